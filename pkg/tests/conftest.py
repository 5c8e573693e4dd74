import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def walk_nodes(topology):
    """All nodes of a topology, explicit and implicit, as NodeRefs."""
    stack = [topology.root()]
    while stack:
        node = stack.pop()
        yield node
        if not node.is_leaf:
            stack.append(node.left())
            stack.append(node.right())
