"""Flat key=value configuration file.

Grammar: one ``section.key = value`` per line, ``#`` starts a comment,
blank lines ignored.  Unknown keys and malformed values are rejected at
load time so a typo cannot silently fall back to a default.
"""
from __future__ import annotations

from pathlib import Path

from .locator import LocatorConfig
from .synth import AugmentParams, SceneParams


class ConfigError(ValueError):
    """Configuration file is malformed or uses unknown keys."""


def _pair(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"expected HxW pair, got {text!r}")
    return int(parts[0]), int(parts[1])


_SCHEMA = {
    "locator.pixels_per_cm": float,
    "locator.plate_w_cm": float,
    "locator.plate_h_cm": float,
    "locator.size_tolerance": float,
    "locator.aspect_ratio": float,
    "locator.aspect_tolerance": float,
    "locator.line_se_length": int,
    "locator.max_candidates": int,
    "locator.median_window": int,
    "locator.merge_se": _pair,
    "locator.erode_se": _pair,
    "train.epochs": int,
    "train.batch_size": int,
    "train.learning_rate": float,
    "train.seed": int,
    "train.validation_fraction": float,
    "train.patience": int,
    "train.preset": str,
    "synth.per_class": int,
    "synth.count": int,
    "synth.rotation_deg": float,
    "synth.translate_px": float,
    "synth.scale_jitter": float,
    "synth.noise_sigma": float,
    "synth.salt_pepper": float,
    "synth.brightness": float,
    "synth.contrast": float,
    "synth.scene_width": int,
    "synth.scene_height": int,
    "paths.atlas": str,
}


def parse_config(text: str) -> dict:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _SCHEMA[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return values


def load_config(path) -> dict:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _section(cfg: dict, prefix: str) -> dict:
    out = {}
    for key, value in cfg.items():
        section, _, name = key.partition(".")
        if section == prefix:
            out[name] = value
    return out


def locator_config(cfg: dict) -> LocatorConfig:
    try:
        return LocatorConfig(**_section(cfg, "locator"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def train_settings(cfg: dict) -> dict:
    """Keyword overrides for GlyphClassifier from train.* keys."""
    settings = _section(cfg, "train")
    if "preset" in settings and settings["preset"] not in ("desk", "paper-replica"):
        raise ConfigError(f"train.preset must be desk or paper-replica, "
                          f"got {settings['preset']!r}")
    return settings


def augment_params(cfg: dict, seed: int | None = None) -> AugmentParams:
    names = ("rotation_deg", "translate_px", "scale_jitter", "noise_sigma",
             "salt_pepper", "brightness", "contrast")
    section = _section(cfg, "synth")
    kwargs = {k: v for k, v in section.items() if k in names}
    if seed is not None:
        kwargs["seed"] = seed
    try:
        return AugmentParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def scene_params(cfg: dict) -> SceneParams:
    section = _section(cfg, "synth")
    kwargs = {}
    if "scene_width" in section:
        kwargs["width"] = section["scene_width"]
    if "scene_height" in section:
        kwargs["height"] = section["scene_height"]
    if "noise_sigma" in section:
        kwargs["noise_sigma"] = section["noise_sigma"]
    try:
        return SceneParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
