"""Deterministic synthetic data: glyph atlas, character corpora, plates
and cluttered scenes with ground truth.

Everything is a pure function of (atlas, parameters, seed): per-sample
generators derive their randomness from a SeedSequence over the master
seed plus the sample index, so corpora are bit-identical across reruns
and order-independent to generate.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import labels
from .acr import PlateReading, validate_reading
from .raster import write_pnm
from .segmenter import normalize_autocrop, resize_bilinear

GLYPH_CANVAS = 32
RENDER_SCALE = 0.8  # base template scale inside the canvas, emulating
                    # the resolution glyphs actually have in a scene crop


class AtlasError(ValueError):
    """The atlas file violates the format or the label map."""


@dataclass
class GlyphAtlas:
    templates: dict[int, np.ndarray]  # class id -> bool (h, w)
    height: int
    width: int

    def template(self, class_id: int) -> np.ndarray:
        return self.templates[class_id]


def parse_atlas(text: str) -> GlyphAtlas:
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("GLYPHS"):
        raise AtlasError("atlas must start with a 'GLYPHS <count> <w> <h>' header")
    try:
        _, count, width, height = lines[0].split()
        count, width, height = int(count), int(width), int(height)
    except ValueError:
        raise AtlasError(f"bad atlas header {lines[0]!r}") from None
    pos = 1
    templates: dict[int, np.ndarray] = {}
    for _ in range(count):
        if pos >= len(lines) or not lines[pos].startswith("CHAR"):
            raise AtlasError(f"expected 'CHAR <id> <latin>' at line {pos + 1}")
        try:
            _, class_id, latin = lines[pos].split()
            class_id = int(class_id)
        except ValueError:
            raise AtlasError(f"bad glyph header {lines[pos]!r}") from None
        if class_id in templates:
            raise AtlasError(f"duplicate class id {class_id}")
        if not 0 <= class_id < labels.N_CLASSES:
            raise AtlasError(f"class id {class_id} out of range")
        if labels.id_to_latin(class_id) != latin:
            raise AtlasError(
                f"class {class_id} keyed {latin!r}, label map says "
                f"{labels.id_to_latin(class_id)!r}")
        rows = lines[pos + 1:pos + 1 + height]
        if len(rows) < height or any(len(r) != width for r in rows):
            raise AtlasError(f"glyph {class_id} is not {width}x{height}")
        if any(set(r) - {"0", "1"} for r in rows):
            raise AtlasError(f"glyph {class_id} has characters outside {{0,1}}")
        mask = np.array([[ch == "1" for ch in r] for r in rows], dtype=bool)
        if not mask.any():
            raise AtlasError(f"glyph {class_id} has no ink")
        templates[class_id] = mask
        pos += 1 + height
    missing = sorted(set(range(labels.N_CLASSES)) - set(templates))
    if missing:
        raise AtlasError(f"atlas is missing class ids {missing}")
    return GlyphAtlas(templates=templates, height=height, width=width)


def load_atlas(path) -> GlyphAtlas:
    return parse_atlas(Path(path).read_text(encoding="utf-8"))


def write_atlas(atlas: GlyphAtlas, path) -> None:
    lines = [f"GLYPHS {len(atlas.templates)} {atlas.width} {atlas.height}"]
    for class_id in sorted(atlas.templates):
        lines.append(f"CHAR {class_id} {labels.id_to_latin(class_id)}")
        for row in atlas.templates[class_id]:
            lines.append("".join("1" if v else "0" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def default_atlas() -> GlyphAtlas:
    text = resources.files("arplate").joinpath("data/default_atlas.txt").read_text("utf-8")
    return parse_atlas(text)


@dataclass
class AugmentParams:
    rotation_deg: float = 5.0
    translate_px: float = 2.0
    scale_jitter: float = 0.10
    noise_sigma: float = 8.0 / 255.0
    salt_pepper: float = 0.005
    brightness: float = 12.0
    contrast: float = 0.08
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.salt_pepper < 1:
            raise ValueError("salt_pepper must lie in [0, 1)")
        for name in ("rotation_deg", "translate_px", "scale_jitter", "noise_sigma",
                     "brightness", "contrast"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def identity_augment(seed: int = 0) -> AugmentParams:
    return AugmentParams(rotation_deg=0, translate_px=0, scale_jitter=0,
                         noise_sigma=0, salt_pepper=0, brightness=0, contrast=0,
                         seed=seed)


def render_template(template: np.ndarray, size: int = GLYPH_CANVAS,
                    rotation_deg: float = 0.0, scale: float = RENDER_SCALE,
                    tx: float = 0.0, ty: float = 0.0,
                    ink: float = 40.0, bg: float = 228.0) -> np.ndarray:
    """Rasterize a binary template onto a light canvas as dark ink.

    The template is scaled, rotated about its center and translated via
    inverse-mapped bilinear sampling; returns a float image.
    """
    template = np.asarray(template, dtype=np.float64)
    th, tw = template.shape
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    cx = cy = (size - 1) / 2.0
    dx = xs - cx - tx
    dy = ys - cy - ty
    rad = np.deg2rad(-rotation_deg)
    cos_t, sin_t = np.cos(rad), np.sin(rad)
    u = (cos_t * dx - sin_t * dy) / scale + (tw - 1) / 2.0
    v = (sin_t * dx + cos_t * dy) / scale + (th - 1) / 2.0
    alpha = _bilinear_sample(template, v, u)
    return bg + (ink - bg) * alpha


def _bilinear_sample(src: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample src at float coordinates, zero outside the grid."""
    h, w = src.shape
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    fy = ys - y0
    fx = xs - x0

    def at(yy, xx):
        valid = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        out = np.zeros(yy.shape)
        out[valid] = src[yy[valid], xx[valid]]
        return out

    tl = at(y0, x0)
    tr = at(y0, x0 + 1)
    bl = at(y0 + 1, x0)
    br = at(y0 + 1, x0 + 1)
    top = tl + (tr - tl) * fx
    bot = bl + (br - bl) * fx
    return top + (bot - top) * fy


def sample_glyph(template: np.ndarray, params: AugmentParams, rng) -> np.ndarray:
    """Draw one augmented 32x32 uint8 glyph image.

    Draw order (rotation, scale, translation, brightness, contrast,
    noise, salt and pepper) is fixed so a seeded rng reproduces the
    sample exactly.
    """
    rotation = rng.uniform(-params.rotation_deg, params.rotation_deg)
    scale = RENDER_SCALE * (1.0 + rng.uniform(-params.scale_jitter, params.scale_jitter))
    tx = rng.uniform(-params.translate_px, params.translate_px)
    ty = rng.uniform(-params.translate_px, params.translate_px)
    img = render_template(template, rotation_deg=rotation, scale=scale, tx=tx, ty=ty)
    if params.contrast:
        img = (img - 128.0) * (1.0 + rng.uniform(-params.contrast, params.contrast)) + 128.0
    if params.brightness:
        img = img + rng.uniform(-params.brightness, params.brightness)
    if params.noise_sigma:
        img = img + rng.normal(0.0, params.noise_sigma * 255.0, size=img.shape)
    if params.salt_pepper:
        u = rng.random(img.shape)
        img = np.where(u < params.salt_pepper / 2, 0.0, img)
        img = np.where((u >= params.salt_pepper / 2) & (u < params.salt_pepper), 255.0, img)
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def canonical_glyph(template: np.ndarray) -> np.ndarray:
    """The un-augmented normalized appearance of a template."""
    return normalize_autocrop(
        np.clip(np.floor(render_template(template) + 0.5), 0, 255).astype(np.uint8))


def nearest_template(glyph: np.ndarray, atlas: GlyphAtlas) -> int:
    """Class of the canonical template closest in L2; a trivial
    classifier used to audit label/pixel consistency."""
    best, best_d = -1, np.inf
    for class_id in sorted(atlas.templates):
        ref = canonical_glyph(atlas.templates[class_id])
        d = float(((glyph - ref) ** 2).sum())
        if d < best_d:
            best, best_d = class_id, d
    return best


def _sample_rng(seed: int, *key: int):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def gen_char_dataset(atlas: GlyphAtlas, per_class: int, params: AugmentParams,
                     out_dir) -> list[tuple[str, int]]:
    """Write per_class augmented samples of every class plus labels.tsv.

    Returns the manifest as (filename, class id) pairs.  Sample i of
    class c is generated from SeedSequence([seed, c, i]) regardless of
    generation order.
    """
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for class_id in range(labels.N_CLASSES):
        template = atlas.template(class_id)
        for i in range(per_class):
            rng = _sample_rng(params.seed, class_id, i)
            img = sample_glyph(template, params, rng)
            name = f"{class_id:02d}_{i:05d}.pgm"
            write_pnm(img, out / name)
            manifest.append((name, class_id))
    with open(out / "labels.tsv", "w", encoding="utf-8") as fh:
        for name, class_id in manifest:
            fh.write(f"{name}\t{class_id}\n")
    return manifest


def load_char_dataset(data_dir):
    """Read a generated corpus into (X, y): normalized glyphs + labels."""
    from .raster import read_pnm

    data = Path(data_dir)
    manifest = data / "labels.tsv"
    if not manifest.exists():
        raise FileNotFoundError(f"no labels.tsv in {data}")
    X, y = [], []
    for lineno, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{manifest}:{lineno}: expected 'filename<TAB>class'")
        name, class_id = parts
        class_id = int(class_id)
        if not 0 <= class_id < labels.N_CLASSES:
            raise ValueError(f"{manifest}:{lineno}: class id {class_id} out of range")
        img = read_pnm(data / name)
        if img.ndim != 2:
            raise ValueError(f"{name}: expected a grayscale glyph")
        X.append(normalize_autocrop(img))
        y.append(class_id)
    if not X:
        raise ValueError(f"{manifest} lists no samples")
    return np.stack(X), np.asarray(y, dtype=np.int64)


@dataclass
class PlateStyle:
    width: int = 380
    height: int = 200
    ink: int = 28
    bg: int = 232
    header_frac: float = 0.28  # nominal header/body boundary
    side_margin_frac: float = 0.05


@dataclass
class SceneTruth:
    bbox: tuple[int, int, int, int]
    digits: str
    letters: str
    chars: list  # (bbox, char) pairs in reading order

    def to_dict(self) -> dict:
        return {
            "bbox": list(self.bbox),
            "digits": self.digits,
            "letters": self.letters,
            "chars": [{"bbox": list(b), "char": c} for b, c in self.chars],
        }

    @staticmethod
    def from_dict(d: dict) -> "SceneTruth":
        return SceneTruth(
            bbox=tuple(d["bbox"]),
            digits=d["digits"],
            letters=d["letters"],
            chars=[(tuple(e["bbox"]), e["char"]) for e in d["chars"]],
        )


def write_truth(truth: SceneTruth, path) -> None:
    Path(path).write_text(
        json.dumps(truth.to_dict(), ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8")


def read_truth(path) -> SceneTruth:
    return SceneTruth.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _grammar_check(digits: str, letters: str) -> None:
    probe = PlateReading(digits=digits, letters=letters, latin="")
    violations = validate_reading(probe)
    if violations:
        raise ValueError("plate grammar violation: " + "; ".join(violations))


def compose_plate(atlas: GlyphAtlas, digits: str, letters: str,
                  style: PlateStyle | None = None):
    """Render a plate image; returns (image, truth_chars, meta).

    truth_chars are (bbox, char) pairs in reading order: digits most
    significant first, then letters in Arabic reading order, i.e. the
    first letter occupies the rightmost cell of the letter zone.  meta
    carries gap_row, the first blank row of the header/body gap.
    """
    style = style or PlateStyle()
    _grammar_check(digits, letters)
    w, h = style.width, style.height
    img = np.full((h, w), style.bg, dtype=np.float64)

    # header marks: a centered block pattern standing in for the country strip
    head_top = int(0.06 * h)
    head_bot = int(0.22 * h)
    marks_w = int(0.42 * w)
    x0 = (w - marks_w) // 2
    n_marks = 5
    step = marks_w // n_marks
    for k in range(n_marks):
        mx = x0 + k * step
        img[head_top:head_bot, mx:mx + int(step * 0.55)] = style.ink
    gap_row = head_bot  # first all-background row below the header marks

    # body cells: digit zone | wide divider | letter zone
    n_d, n_l = len(digits), len(letters)
    n = n_d + n_l
    margin = int(style.side_margin_frac * w)
    avail = w - 2 * margin
    # cell, intra-zone gap (0.25 cell) and divider (1.2 cells) widths
    cell = avail / (n + 0.25 * (n - 2) + 1.2)
    gap = 0.25 * cell
    divider = 1.2 * cell
    g = int(min(cell, 0.45 * h))  # square glyphs
    body_top = int(style.header_frac * h)
    glyph_y = body_top + (h - body_top - g) // 2

    truth_chars = []
    x = float(margin)
    xs = []
    for k in range(n_d):
        xs.append(int(round(x)))
        x += cell + (gap if k < n_d - 1 else 0)
    x += divider
    letter_xs = []
    for k in range(n_l):
        letter_xs.append(int(round(x)))
        x += cell + (gap if k < n_l - 1 else 0)

    def paint(cx, char):
        template = atlas.template(labels.char_to_id(char))
        mask = resize_bilinear(template.astype(np.float64), g, g)
        cell_img = style.bg + (style.ink - style.bg) * mask
        img[glyph_y:glyph_y + g, cx:cx + g] = np.minimum(
            img[glyph_y:glyph_y + g, cx:cx + g], cell_img)
        return (cx, glyph_y, g, g)

    for k, char in enumerate(digits):
        truth_chars.append((paint(xs[k], char), char))
    for k, char in enumerate(letters):
        # first letter of the reading goes to the rightmost cell
        truth_chars.append((paint(letter_xs[n_l - 1 - k], char), char))

    meta = {"gap_row": gap_row, "body_top": body_top}
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8), truth_chars, meta


@dataclass
class SceneParams:
    width: int = 420
    height: int = 300
    scale_lo: float = 0.50
    scale_hi: float = 0.66
    rotation_deg: float = 3.0
    noise_sigma: float = 3.0 / 255.0
    brightness: float = 15.0
    bg_lo: float = 95.0
    bg_hi: float = 140.0
    clutter: bool = True
    margin: int = 10

    def __post_init__(self):
        if self.scale_lo > self.scale_hi or self.scale_lo <= 0:
            raise ValueError("bad scale range")


def _transform_box(bbox, scale, rad, plate_c, dest_c):
    x, y, w, h = bbox
    corners = np.array([[x, y], [x + w, y], [x, y + h], [x + w, y + h]], dtype=np.float64)
    rel = (corners - plate_c) * scale
    cos_t, sin_t = np.cos(rad), np.sin(rad)
    rot = np.stack([cos_t * rel[:, 0] - sin_t * rel[:, 1],
                    sin_t * rel[:, 0] + cos_t * rel[:, 1]], axis=1)
    pts = rot + dest_c
    x0, y0 = np.floor(pts.min(axis=0))
    x1, y1 = np.ceil(pts.max(axis=0))
    return int(x0), int(y0), int(x1 - x0), int(y1 - y0)


def _place_clutter(canvas, rng, forbidden, size_range, value, tries=60):
    h, w = canvas.shape
    fw_lo, fw_hi, fh_lo, fh_hi = size_range
    for _ in range(tries):
        cw = int(rng.integers(fw_lo, fw_hi + 1))
        ch = int(rng.integers(fh_lo, fh_hi + 1))
        if cw >= w - 2 or ch >= h - 2:
            continue
        cx = int(rng.integers(1, w - cw))
        cy = int(rng.integers(1, h - ch))
        fx, fy, fw, fh = forbidden
        if cx < fx + fw and cx + cw > fx and cy < fy + fh and cy + ch > fy:
            continue
        canvas[cy:cy + ch, cx:cx + cw] = value
        return (cx, cy, cw, ch)
    return None


def compose_scene(plate: np.ndarray, truth_chars, digits: str, letters: str,
                  params: SceneParams, rng):
    """Paste a plate into a cluttered scene; returns (rgb, SceneTruth).

    The plate is scaled, rotated and positioned from the rng; clutter
    includes long thin bars (line-elimination fodder) and rectangles
    outside the plate size gate (object-elimination fodder), all placed
    clear of the plate.
    """
    ph, pw = plate.shape
    scale = float(rng.uniform(params.scale_lo, params.scale_hi))
    theta = float(rng.uniform(-params.rotation_deg, params.rotation_deg))
    rad = np.deg2rad(theta)
    bg = float(rng.uniform(params.bg_lo, params.bg_hi))

    dw = int(np.ceil(scale * (pw * abs(np.cos(rad)) + ph * abs(np.sin(rad))))) + 2
    dh = int(np.ceil(scale * (pw * abs(np.sin(rad)) + ph * abs(np.cos(rad))))) + 2
    m = params.margin
    if dw + 2 * m >= params.width or dh + 2 * m >= params.height:
        raise ValueError("plate does not fit the scene at this scale")
    x0 = int(rng.integers(m, params.width - dw - m + 1))
    y0 = int(rng.integers(m, params.height - dh - m + 1))

    canvas = np.full((params.height, params.width), bg, dtype=np.float64)

    # inverse-map the destination rect into plate coordinates
    ys, xs = np.mgrid[y0:y0 + dh, x0:x0 + dw].astype(np.float64)
    dest_c = np.array([x0 + (dw - 1) / 2.0, y0 + (dh - 1) / 2.0])
    plate_c = np.array([(pw - 1) / 2.0, (ph - 1) / 2.0])
    dx = xs - dest_c[0]
    dy = ys - dest_c[1]
    cos_t, sin_t = np.cos(-rad), np.sin(-rad)
    u = (cos_t * dx - sin_t * dy) / scale + plate_c[0]
    v = (sin_t * dx + cos_t * dy) / scale + plate_c[1]
    inside = (u >= 0) & (u <= pw - 1) & (v >= 0) & (v <= ph - 1)
    sampled = _bilinear_sample(plate.astype(np.float64), np.clip(v, 0, ph - 1),
                               np.clip(u, 0, pw - 1))
    region = canvas[y0:y0 + dh, x0:x0 + dw]
    canvas[y0:y0 + dh, x0:x0 + dw] = np.where(inside, sampled, region)

    plate_bbox = (x0, y0, dw, dh)
    chars = [(_transform_box(b, scale, rad, plate_c, dest_c), c) for b, c in truth_chars]

    if params.clutter:
        # keep-out wide enough that dilation cannot bridge clutter onto
        # the plate blob and fuse them into one oversized region
        avoid = (x0 - 22, y0 - 22, dw + 44, dh + 44)
        # oversized (taller than the plate gate) and undersized rectangles
        _place_clutter(canvas, rng, avoid, (95, 130, 185, 215), 215.0)
        _place_clutter(canvas, rng, avoid, (18, 38, 10, 22), 225.0)
        for _ in range(int(rng.integers(1, 3))):
            bar_h = int(rng.integers(2, 4))
            bar_w = int(rng.integers(int(0.5 * params.width), int(0.85 * params.width)))
            _place_clutter(canvas, rng, avoid, (bar_w, bar_w, bar_h, bar_h),
                           float(rng.choice([35.0, 215.0])))

    canvas += rng.uniform(-params.brightness, params.brightness)
    if params.noise_sigma:
        canvas += rng.normal(0.0, params.noise_sigma * 255.0, size=canvas.shape)
    gray = np.clip(np.floor(canvas + 0.5), 0, 255)
    gains = (1.04, 1.0, 0.96)  # mild warm tint so color input is exercised
    rgb = np.stack([np.clip(gray * g, 0, 255) for g in gains], axis=2).astype(np.uint8)
    truth = SceneTruth(bbox=plate_bbox, digits=digits, letters=letters, chars=chars)
    return rgb, truth


def random_registration(rng) -> tuple[str, str]:
    """A grammar-valid random plate: 3-4 digits and 2-3 letters."""
    n_d = int(rng.choice([3, 4]))
    n_l = int(rng.choice([2, 3]))
    digits = "".join(rng.choice(list(labels.DIGITS)) for _ in range(n_d))
    letters = "".join(rng.choice(list(labels.LETTERS)) for _ in range(n_l))
    return digits, letters


def gen_scene_dataset(atlas: GlyphAtlas, count: int, out_dir, seed: int = 0,
                      scene_params: SceneParams | None = None,
                      style: PlateStyle | None = None) -> list[tuple[str, str]]:
    """Write count scene PPMs plus per-scene truth JSONs.

    Returns (image name, truth name) pairs.  Scene i derives from
    SeedSequence([seed, 1, i]).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    params = scene_params or SceneParams()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for i in range(count):
        rng = _sample_rng(seed, 1, i)
        digits, letters = random_registration(rng)
        plate, truth_chars, _ = compose_plate(atlas, digits, letters, style)
        rgb, truth = compose_scene(plate, truth_chars, digits, letters, params, rng)
        img_name = f"scene_{i:05d}.ppm"
        truth_name = f"scene_{i:05d}.json"
        write_pnm(rgb, out / img_name)
        write_truth(truth, out / truth_name)
        names.append((img_name, truth_name))
    return names
