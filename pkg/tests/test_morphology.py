import numpy as np
import pytest

from arplate.morphology import (
    Region,
    StructuringElement,
    closing,
    connected_components,
    dilate,
    erode,
    fill_holes,
    label_components,
    opening,
)
from oracles import dilate_oracle, erode_oracle, fill_holes_oracle, flood_label_oracle

FULL3 = StructuringElement.square(3)


def random_se(rng):
    h, w = rng.choice([1, 3, 5], size=2)
    mask = rng.random((h, w)) < 0.5
    mask[h // 2, w // 2] = True
    return StructuringElement(mask)


def canonical_partition(labels):
    """Set of frozensets of pixel coordinates, one per component."""
    comps = {}
    ys, xs = np.nonzero(labels)
    for y, x in zip(ys.tolist(), xs.tolist()):
        comps.setdefault(labels[y, x], set()).add((y, x))
    return {frozenset(s) for s in comps.values()}


class TestStructuringElement:
    def test_rejects_even_dims(self):
        with pytest.raises(ValueError):
            StructuringElement(np.ones((2, 3), dtype=bool))

    def test_rejects_unset_origin(self):
        mask = np.ones((3, 3), dtype=bool)
        mask[1, 1] = False
        with pytest.raises(ValueError):
            StructuringElement(mask)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            StructuringElement(np.zeros((3, 3), dtype=bool))


class TestDilateErode:
    def test_point_dilates_to_block(self):
        img = np.zeros((5, 5), dtype=bool)
        img[2, 2] = True
        out = dilate(img, FULL3)
        expected = np.zeros((5, 5), dtype=bool)
        expected[1:4, 1:4] = True
        assert np.array_equal(out, expected)

    def test_empty_image_stays_empty(self):
        img = np.zeros((6, 6), dtype=bool)
        assert not dilate(img, FULL3).any()

    def test_block_erodes_to_point(self):
        img = np.zeros((5, 5), dtype=bool)
        img[1:4, 1:4] = True
        out = erode(img, FULL3)
        assert out.sum() == 1
        assert out[2, 2]

    def test_identity_se_is_noop(self):
        img = np.ones((4, 7), dtype=bool)
        se1 = StructuringElement(np.ones((1, 1), dtype=bool))
        assert np.array_equal(erode(img, se1), img)
        assert np.array_equal(dilate(img, se1), img)

    def test_dilate_matches_definition_oracle(self, rng):
        for _ in range(15):
            img = rng.random((32, 32)) < 0.4
            se = random_se(rng)
            assert np.array_equal(dilate(img, se), dilate_oracle(img, se.mask))

    def test_erode_matches_definition_oracle(self, rng):
        for _ in range(15):
            img = rng.random((32, 32)) < 0.6
            se = random_se(rng)
            assert np.array_equal(erode(img, se), erode_oracle(img, se.mask))

    def test_duality_with_reflected_se(self, rng):
        # pad with background so no out-of-bounds read is involved,
        # where the two conventions disagree
        for _ in range(10):
            img = rng.random((32, 32)) < 0.5
            se = random_se(rng)
            r = max(se.shape) // 2
            padded = np.pad(img, r, constant_values=False)
            dual = ~erode(~padded, se.reflected())
            inner = dual[r:r + 32, r:r + 32] if r else dual
            assert np.array_equal(dilate(img, se), inner)

    def test_extensivity_and_antiextensivity(self, rng):
        img = rng.random((20, 20)) < 0.5
        se = random_se(rng)
        assert np.all(img <= dilate(img, se))
        assert np.all(erode(img, se) <= img)

    def test_monotone_in_input(self, rng):
        small = rng.random((16, 16)) < 0.3
        big = small | (rng.random((16, 16)) < 0.3)
        se = random_se(rng)
        assert np.all(dilate(small, se) <= dilate(big, se))
        assert np.all(erode(small, se) <= erode(big, se))


class TestOpenClose:
    def test_open_removes_isolated_pixels(self):
        img = np.zeros((9, 9), dtype=bool)
        img[1, 1] = True
        img[4:7, 4:7] = True
        out = opening(img, FULL3)
        assert not out[1, 1]
        assert out[5, 5]

    def test_open_idempotent(self, rng):
        fixed = [FULL3, StructuringElement.rectangle(3, 5), StructuringElement.hline(5)]
        for i in range(100):
            img = rng.random((24, 24)) < 0.5
            se = fixed[i % len(fixed)] if i % 2 else random_se(rng)
            once = opening(img, se)
            assert np.array_equal(opening(once, se), once)

    def test_close_fills_one_pixel_gap(self):
        img = np.zeros((5, 11), dtype=bool)
        img[2, 1:5] = True
        img[2, 6:10] = True
        out = closing(img, FULL3)
        assert out[2, 5]


class TestFillHoles:
    def test_donut_becomes_disk(self):
        img = np.zeros((9, 9), dtype=bool)
        img[2:7, 2:7] = True
        img[3:6, 3:6] = False
        out = fill_holes(img)
        assert np.array_equal(out, np.pad(np.ones((5, 5), dtype=bool), 2))

    def test_open_cavity_is_preserved(self):
        img = np.zeros((8, 8), dtype=bool)
        img[2:7, 2] = True
        img[2:7, 6] = True
        img[6, 2:7] = True  # U shape, open to the top border
        assert np.array_equal(fill_holes(img), fill_holes_oracle(img))
        assert not fill_holes(img)[4, 4]

    def test_matches_flood_oracle(self, rng):
        for _ in range(15):
            img = rng.random((24, 24)) < 0.45
            assert np.array_equal(fill_holes(img), fill_holes_oracle(img))

    def test_idempotent(self, rng):
        img = rng.random((20, 20)) < 0.5
        once = fill_holes(img)
        assert np.array_equal(fill_holes(once), once)


class TestConnectedComponents:
    def test_diagonal_pair_connectivity(self):
        img = np.zeros((4, 4), dtype=bool)
        img[1, 1] = True
        img[2, 2] = True
        assert len(connected_components(img, 4)) == 2
        assert len(connected_components(img, 8)) == 1

    def test_empty_image(self):
        assert connected_components(np.zeros((5, 5), dtype=bool)) == []

    @pytest.mark.parametrize("connectivity", [4, 8])
    def test_partition_matches_flood_oracle(self, rng, connectivity):
        for _ in range(15):
            img = rng.random((24, 24)) < 0.5
            ours, n = label_components(img, connectivity)
            ref = flood_label_oracle(img, connectivity)
            assert n == ref.max()
            assert canonical_partition(ours) == canonical_partition(ref)
            # raster-order numbering makes the labelings identical, not
            # just equivalent
            assert np.array_equal(ours, ref)

    def test_region_stats(self, rng):
        img = rng.random((24, 24)) < 0.4
        regions = connected_components(img, 8)
        assert sum(r.area for r in regions) == int(img.sum())
        labels, _ = label_components(img, 8)
        for r in regions:
            x, y, w, h = r.bbox
            inside = labels[y:y + h, x:x + w] == r.label
            assert inside.any(axis=0).all() or w == 1
            assert inside[0].any() and inside[-1].any()
            assert inside[:, 0].any() and inside[:, -1].any()
            assert (labels == r.label).sum() == r.area

    def test_labels_follow_raster_order_of_first_pixel(self):
        img = np.zeros((5, 5), dtype=bool)
        img[0, 3] = True   # first in raster order
        img[2, 0:2] = True
        img[4, 4] = True
        regions = connected_components(img, 8)
        assert [r.label for r in regions] == [1, 2, 3]
        assert regions[0].bbox == (3, 0, 1, 1)
        assert regions[1].bbox == (0, 2, 2, 1)
        assert regions[2].bbox == (4, 4, 1, 1)

    def test_fill_ratio(self):
        r = Region(label=1, bbox=(0, 0, 4, 2), area=4)
        assert r.fill_ratio == 0.5
