import numpy as np
import pytest

from medtree import (
    FrequencyProfile,
    GrayImage,
    IntervalCountTree,
    box_mean,
    build_adaptive_topology,
    estimate_median_profile,
    gen_image,
    mix_profiles,
    source_histogram,
    uniform_topology,
    weighted_mean_depth,
)

from conftest import walk_nodes


def make_profile(weights):
    return FrequencyProfile(np.asarray(weights, dtype=np.float64))


class TestFrequencyProfile:
    def test_validation(self):
        with pytest.raises(ValueError):
            make_profile(np.zeros(100))  # not a power of two
        with pytest.raises(ValueError):
            make_profile([-1.0, 2.0])
        with pytest.raises(ValueError):
            make_profile(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            make_profile([1.0, np.nan])
        with pytest.raises(ValueError):
            make_profile([1.0, np.inf])

    def test_degenerate_flag(self):
        assert make_profile(np.zeros(16)).is_degenerate
        assert not make_profile(np.ones(16)).is_degenerate

    def test_bit_depth(self):
        assert make_profile(np.ones(256)).bit_depth == 8
        assert make_profile(np.ones(1 << 16)).bit_depth == 16


class TestMixProfiles:
    def test_identical_inputs_keep_shape(self, rng):
        w = rng.random(256)
        mixed = mix_profiles(make_profile(w), make_profile(w))
        assert np.allclose(mixed.weights, 2 * w / w.sum())

    def test_two_spikes(self):
        a = np.zeros(256)
        a[10] = 7.0
        b = np.zeros(256)
        b[200] = 3.0
        mixed = mix_profiles(make_profile(a), make_profile(b))
        assert mixed.weights[10] == pytest.approx(1.0)
        assert mixed.weights[200] == pytest.approx(1.0)
        assert mixed.weights.sum() == pytest.approx(2.0)

    def test_zero_inputs_are_degenerate(self):
        mixed = mix_profiles(make_profile(np.zeros(64)), make_profile(np.zeros(64)))
        assert mixed.is_degenerate

    def test_one_empty_side_contributes_nothing(self, rng):
        w = rng.random(64)
        mixed = mix_profiles(make_profile(w), make_profile(np.zeros(64)))
        assert np.allclose(mixed.weights, w / w.sum())

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            mix_profiles(make_profile(np.ones(64)), make_profile(np.ones(128)))


class TestAdaptiveBuild:
    def test_flat_profile_reproduces_uniform_splits(self, rng):
        topo = build_adaptive_topology(make_profile(np.ones(256)))
        assert topo.slots == 256
        # identical layout: counters of identical multisets match slot by slot
        uni = IntervalCountTree(uniform_topology(8))
        ada = IntervalCountTree(topo)
        for v in rng.integers(0, 256, size=500).tolist():
            uni.add(v)
            ada.add(v)
        assert np.array_equal(uni.counts, ada.counts)

    @pytest.mark.parametrize("d", [8, 16])
    def test_constant_storage(self, d, rng):
        profile = make_profile(rng.random(1 << d))
        assert build_adaptive_topology(profile).slots == 1 << d

    def test_point_mass_is_isolated_quickly(self):
        w = np.zeros(256)
        w[200] = 5.0
        topo = build_adaptive_topology(make_profile(w))
        assert weighted_mean_depth(topo, make_profile(w)) < 8

    def test_compact_mass_shortens_paths(self, rng):
        # >= 90% of the mass inside a 32-value range must beat depth d
        w = rng.random(256) * 0.02
        w[100:120] += 10.0
        profile = make_profile(w)
        topo = build_adaptive_topology(profile)
        assert weighted_mean_depth(topo, profile) < 8
        assert weighted_mean_depth(uniform_topology(8), profile) == 8

    def test_every_interval_partitions(self, rng):
        topo = build_adaptive_topology(make_profile(rng.random(64)))
        for node in walk_nodes(topo):
            if node.is_leaf:
                continue
            left, right = node.left(), node.right()
            assert left.lo == node.lo and left.hi == right.lo and right.hi == node.hi

    def test_split_is_locally_optimal(self, rng):
        weights = rng.random(64)
        prefix = np.concatenate(([0.0], np.cumsum(weights)))
        topo = build_adaptive_topology(make_profile(weights))
        for node in walk_nodes(topo):
            if node.is_leaf or node.slot < 0:
                continue
            mass = prefix[node.hi] - prefix[node.lo]
            if mass <= 0:
                continue
            balance = lambda s: abs(
                (prefix[s] - prefix[node.lo]) - (prefix[node.hi] - prefix[s])
            )
            best = min(balance(s) for s in range(node.lo + 1, node.hi))
            assert balance(node.split) == pytest.approx(best)

    def test_select_agrees_with_uniform_for_all_ranks(self, rng):
        weights = rng.random(256) ** 4
        topo = build_adaptive_topology(make_profile(weights))
        values = rng.integers(0, 256, size=400).tolist()
        uni = IntervalCountTree(uniform_topology(8))
        ada = IntervalCountTree(topo)
        for v in values:
            uni.add(v)
            ada.add(v)
        for r in range(1, len(values) + 1):
            assert ada.select_rank(r) == uni.select_rank(r)

    def test_zero_mass_subintervals_bisect(self):
        w = np.zeros(16)
        w[3] = 1.0
        topo = build_adaptive_topology(make_profile(w))
        # the empty side of every split must be subdivided like a uniform tree
        for node in walk_nodes(topo):
            if node.is_leaf:
                continue
            if not w[node.lo : node.hi].any():
                assert node.split == node.lo + node.width // 2

    def test_leaf_precision(self):
        topo = build_adaptive_topology(make_profile(np.ones(256)), leaf_precision=4)
        widths = [n.width for n in walk_nodes(topo) if n.is_leaf]
        assert set(widths) == {4}
        assert topo.slots == 64

    def test_bad_leaf_precision(self):
        with pytest.raises(ValueError):
            build_adaptive_topology(make_profile(np.ones(16)), leaf_precision=0)


class TestMedianProfileEstimate:
    def test_constant_image_is_single_spike(self):
        image = gen_image("constant", 16, 12, value=77)
        profile = estimate_median_profile(image, 5)
        assert profile.weights[77] == 16 * 12
        assert profile.total == 16 * 12

    def test_mass_equals_pixel_count(self, rng):
        image = GrayImage(rng.integers(0, 256, size=(21, 17), dtype=np.uint8))
        assert estimate_median_profile(image, 3).total == 21 * 17

    def test_two_flat_halves(self):
        px = np.zeros((20, 40), dtype=np.uint8)
        px[:, 20:] = 200
        profile = estimate_median_profile(GrayImage(px), 3)
        # mass sits on the two plateaus plus a thin ramp between them
        assert profile.weights[0] + profile.weights[200] >= 0.9 * px.size
        assert profile.weights[1:200].sum() <= 0.1 * px.size

    def test_window_too_large(self):
        image = gen_image("constant", 4, 4)
        with pytest.raises(ValueError):
            estimate_median_profile(image, 11)


class TestBoxMean:
    def test_matches_brute_force(self, rng):
        px = rng.integers(0, 256, size=(9, 13), dtype=np.uint8)
        got = box_mean(GrayImage(px), 3)
        padded = np.pad(px.astype(np.float64), 1, mode="edge")
        for y in range(9):
            for x in range(13):
                expected = padded[y : y + 3, x : x + 3].mean()
                assert got[y, x] == pytest.approx(expected)

    def test_constant_invariant(self):
        image = gen_image("constant", 8, 8, value=42)
        assert np.allclose(box_mean(image, 5), 42.0)


class TestSourceHistogram:
    def test_counts(self):
        px = np.array([[0, 0], [255, 3]], dtype=np.uint8)
        profile = source_histogram(GrayImage(px))
        assert profile.weights[0] == 2
        assert profile.weights[3] == 1
        assert profile.weights[255] == 1
        assert profile.total == 4
