import numpy as np
import pytest

from arplate import labels, synth
from arplate.locator import LocatorConfig, locate_plates, locate_with_stages
from arplate.synth import (
    AtlasError,
    AugmentParams,
    SceneParams,
    compose_plate,
    compose_scene,
    gen_char_dataset,
    gen_scene_dataset,
    identity_augment,
    load_atlas,
    load_char_dataset,
    nearest_template,
    parse_atlas,
    read_truth,
    sample_glyph,
    write_atlas,
)
from oracles import iou_oracle


class TestAtlas:
    def test_default_atlas_shape(self, atlas):
        assert len(atlas.templates) == 26
        assert (atlas.height, atlas.width) == (24, 24)
        for class_id, template in atlas.templates.items():
            assert template.shape == (24, 24)
            assert template.sum() >= 1

    def test_templates_pairwise_distinct(self, atlas):
        for i in range(26):
            for j in range(i + 1, 26):
                assert (atlas.templates[i] ^ atlas.templates[j]).any()

    def test_roundtrip(self, atlas, tmp_path):
        path = tmp_path / "atlas.txt"
        write_atlas(atlas, path)
        again = load_atlas(path)
        for class_id in range(26):
            assert np.array_equal(again.templates[class_id], atlas.templates[class_id])

    def test_missing_class_rejected(self, atlas, tmp_path):
        path = tmp_path / "atlas.txt"
        partial = synth.GlyphAtlas(
            templates={k: v for k, v in atlas.templates.items() if k != 25},
            height=24, width=24)
        write_atlas(partial, path)
        with pytest.raises(AtlasError, match="missing class ids \\[25\\]"):
            load_atlas(path)

    def test_duplicate_id_rejected(self):
        glyph = "CHAR 0 1\n" + "\n".join("0" * 4 for _ in range(4))
        text = "GLYPHS 2 4 4\n" + glyph + "\n" + glyph
        with pytest.raises(AtlasError, match="no ink|duplicate"):
            parse_atlas(text)

    def test_bad_dimensions_rejected(self):
        text = "GLYPHS 1 4 4\nCHAR 0 1\n1111\n1111\n1111"
        with pytest.raises(AtlasError, match="not 4x4"):
            parse_atlas(text)

    def test_wrong_latin_key_rejected(self):
        rows = "\n".join("1111" for _ in range(4))
        text = f"GLYPHS 1 4 4\nCHAR 0 Z\n{rows}"
        with pytest.raises(AtlasError, match="label map"):
            parse_atlas(text)


class TestCharDataset:
    def test_counts_and_manifest(self, atlas, tmp_path):
        manifest = gen_char_dataset(atlas, 3, AugmentParams(seed=5), tmp_path)
        assert len(manifest) == 78
        files = sorted(p.name for p in tmp_path.glob("*.pgm"))
        assert len(files) == 78
        lines = (tmp_path / "labels.tsv").read_text().splitlines()
        assert len(lines) == 78
        assert sorted(name for name, _ in manifest) == files

    def test_identity_augmentation_reproduces_template(self, atlas, tmp_path):
        gen_char_dataset(atlas, 1, identity_augment(seed=0), tmp_path)
        X, y = load_char_dataset(tmp_path)
        for glyph, class_id in zip(X, y):
            ref = synth.canonical_glyph(atlas.template(int(class_id)))
            assert np.allclose(glyph, ref)

    def test_same_seed_bit_identical(self, atlas, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        gen_char_dataset(atlas, 2, AugmentParams(seed=9), a)
        gen_char_dataset(atlas, 2, AugmentParams(seed=9), b)
        for pa in sorted(a.iterdir()):
            assert pa.read_bytes() == (b / pa.name).read_bytes()

    def test_nearest_template_on_clean_samples(self, atlas, tmp_path):
        gen_char_dataset(atlas, 1, identity_augment(seed=0), tmp_path)
        X, y = load_char_dataset(tmp_path)
        for glyph, class_id in zip(X, y):
            assert nearest_template(glyph, atlas) == int(class_id)

    def test_load_rejects_missing_manifest(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_char_dataset(tmp_path)

    def test_load_rejects_bad_manifest_row(self, atlas, tmp_path):
        gen_char_dataset(atlas, 1, identity_augment(seed=0), tmp_path)
        manifest = tmp_path / "labels.tsv"
        manifest.write_text(manifest.read_text() + "orphan.pgm\tnot_a_number\n")
        with pytest.raises(ValueError):
            load_char_dataset(tmp_path)


class TestComposePlate:
    def test_boxes_and_zones(self, atlas):
        img, chars, meta = compose_plate(atlas, "٣٤٥", "سطم")
        assert img.shape == (200, 380)
        assert len(chars) == 6
        xs = [b[0] for b, _ in chars]
        # digits left of letters; first letter is the rightmost box
        assert max(xs[:3]) < min(xs[3:])
        assert xs[3] == max(xs[3:])

    def test_four_two_variant(self, atlas):
        img, chars, _ = compose_plate(atlas, "١٢٣٤", "بي")
        assert len(chars) == 6
        assert [c for _, c in chars] == list("١٢٣٤") + list("بي")

    def test_each_box_contains_its_template_ink(self, atlas):
        img, chars, _ = compose_plate(atlas, "٧٨١", "قبل")
        for (x, y, w, h), char in chars:
            cell = img[y:y + h, x:x + w]
            assert (cell < 128).sum() >= 10  # dark ink present

    def test_grammar_violation_rejected(self, atlas):
        with pytest.raises(ValueError, match="grammar"):
            compose_plate(atlas, "٣٤٥٦٧", "سطم")
        with pytest.raises(ValueError, match="grammar"):
            compose_plate(atlas, "٣٤٥", "س")


class TestComposeScene:
    def test_deterministic(self, atlas):
        plate, chars, _ = compose_plate(atlas, "٣٤٥", "سطم")
        a, ta = compose_scene(plate, chars, "٣٤٥", "سطم", SceneParams(),
                              np.random.default_rng(4))
        b, tb = compose_scene(plate, chars, "٣٤٥", "سطم", SceneParams(),
                              np.random.default_rng(4))
        assert np.array_equal(a, b)
        assert ta.to_dict() == tb.to_dict()

    def test_clean_scene_localizes_well(self, atlas):
        plate, chars, _ = compose_plate(atlas, "٣٤٥", "سطم")
        params = SceneParams(clutter=False, rotation_deg=0.0, noise_sigma=0.0)
        rgb, truth = compose_scene(plate, chars, "٣٤٥", "سطم", params,
                                   np.random.default_rng(1))
        cands = locate_plates(rgb, LocatorConfig(pixels_per_cm=5))
        assert cands
        assert iou_oracle(cands[0].bbox, truth.bbox) >= 0.9

    def test_long_bar_removed_before_candidates(self, atlas):
        from arplate.morphology import connected_components

        plate, chars, _ = compose_plate(atlas, "٣٤٥", "سطم")
        params = SceneParams(rotation_deg=0.0, noise_sigma=0.0, clutter=False)
        rng = np.random.default_rng(11)
        rgb, truth = compose_scene(plate, chars, "٣٤٥", "سطم", params, rng)
        x, y, w, h = truth.bbox
        # plant a long thin bar well away from the plate
        bar_y = 8 if y > 40 else rgb.shape[0] - 12
        rgb = rgb.copy()
        rgb[bar_y:bar_y + 3, 20:400] = 30
        _, stages = locate_with_stages(rgb, LocatorConfig(pixels_per_cm=5))

        def thin_bars(mask):
            out = mask.copy()
            out[max(0, y - 8):y + h + 8, max(0, x - 8):x + w + 8] = False
            return [r for r in connected_components(out, 8)
                    if max(r.width, r.height) >= 120 and min(r.width, r.height) <= 16]

        assert thin_bars(stages["eroded"])       # present before elimination
        assert not thin_bars(stages["lines"])    # gone afterwards
        cands, _ = locate_with_stages(rgb, LocatorConfig(pixels_per_cm=5))
        assert cands and iou_oracle(cands[0].bbox, truth.bbox) >= 0.7

    def test_plate_too_large_for_scene(self, atlas):
        plate, chars, _ = compose_plate(atlas, "٣٤٥", "سطم")
        small = SceneParams(width=150, height=100)
        with pytest.raises(ValueError, match="fit"):
            compose_scene(plate, chars, "٣٤٥", "سطم", small, np.random.default_rng(0))

    def test_truth_char_boxes_cover_ink(self, atlas):
        plate, chars, _ = compose_plate(atlas, "٣٤٥", "سطم")
        params = SceneParams(clutter=False, noise_sigma=0.0)
        rgb, truth = compose_scene(plate, chars, "٣٤٥", "سطم", params,
                                   np.random.default_rng(3))
        gray = rgb[..., 1]
        for (x, y, w, h), _ in truth.chars:
            assert (gray[y:y + h, x:x + w] < 128).sum() >= 5


class TestSceneDataset:
    def test_counts_and_truth_roundtrip(self, atlas, tmp_path):
        names = gen_scene_dataset(atlas, 3, tmp_path, seed=2)
        assert len(names) == 3
        assert len(list(tmp_path.glob("*.ppm"))) == 3
        assert len(list(tmp_path.glob("*.json"))) == 3
        for _, truth_name in names:
            truth = read_truth(tmp_path / truth_name)
            assert len(truth.digits) in (3, 4)
            assert len(truth.letters) in (2, 3)
            assert len(truth.chars) == len(truth.digits) + len(truth.letters)

    def test_same_seed_bit_identical(self, atlas, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        gen_scene_dataset(atlas, 2, a, seed=8)
        gen_scene_dataset(atlas, 2, b, seed=8)
        for pa in sorted(a.iterdir()):
            assert pa.read_bytes() == (b / pa.name).read_bytes()


class TestAugmentParams:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            AugmentParams(rotation_deg=-1)

    def test_rejects_bad_salt_pepper(self):
        with pytest.raises(ValueError):
            AugmentParams(salt_pepper=1.0)

    def test_sample_is_uint8_image(self, atlas):
        img = sample_glyph(atlas.template(0), AugmentParams(seed=1),
                           np.random.default_rng(1))
        assert img.shape == (32, 32)
        assert img.dtype == np.uint8
