"""Run configuration: flat ``key = value`` files with dotted sections.

Example::

    # Brownian sheet sanity run
    hurst.kind = constant
    hurst.h = 0.5, 0.5
    n = 64
    grid.resolution = 5
    grid.lo = 0.2
    reps = 2000
    seed = 20261014

Lists are comma separated; matrices and point lists separate rows with
``;``. Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .donsker import DISTRIBUTIONS
from .grid import Grid
from .hurst import GriddedTable, HurstField


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


HURST_KINDS = ("constant", "affine", "sinusoidal", "table")

_HURST_PARAMS = {
    "constant": {"h"},
    "affine": {"base", "slopes"},
    "sinusoidal": {"mean", "amplitude", "frequency"},
    "table": {"axes", "values"},
}

# key -> (parser name, default)
KEYS = {
    "hurst.kind": ("str", None),
    "hurst.h": ("vec", None),
    "hurst.base": ("vec", None),
    "hurst.slopes": ("mat", None),
    "hurst.mean": ("vec", None),
    "hurst.amplitude": ("vec", None),
    "hurst.frequency": ("vec", None),
    "hurst.axes": ("mat", None),
    "hurst.values": ("vec", None),
    "hurst.alpha": ("vec", None),
    "hurst.beta": ("vec", None),
    "hurst.gamma": ("float", None),
    "hurst.holder_const": ("float", None),
    "d": ("int", None),
    "n": ("int", 64),
    "n_list": ("ivec", [8, 16, 32, 64]),
    "dist": ("str", "rademacher"),
    "grid.resolution": ("ivec", [5]),
    "grid.lo": ("vec", [0.2]),
    "grid.hi": ("vec", [1.0]),
    "reps": ("int", 1000),
    "seed": ("int", 0),
    "output_dir": ("str", "mfrl-out"),
    "format": ("str", "csv"),
    "fdd.points": ("mat", None),
    "fdd.coeffs": ("vec", None),
    "fdd.tol": ("float", 0.02),
    "cov.tolerance": ("float", 0.02),
    "check.t0": ("vec", None),
    "check.moment_m": ("int", 4),
    "check.moment_reps": ("int", None),
    "check.hurst_resolution": ("int", 33),
    "check.negative_control": ("bool", False),
    "check.ks": ("bool", True),
}


def _parse(kind, key, text):
    text = text.strip()
    try:
        if kind == "str":
            return text
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind == "vec":
            return [float(x) for x in text.split(",") if x.strip()]
        if kind == "ivec":
            return [int(x) for x in text.split(",") if x.strip()]
        if kind == "mat":
            return [[float(x) for x in row.split(",") if x.strip()]
                    for row in text.split(";") if row.strip()]
    except ValueError:
        raise ConfigError(key, f"cannot parse {text!r} as {kind}") from None
    raise AssertionError(kind)


def parse_config_text(text: str, overrides=()) -> dict:
    """Parse config text into a dict of typed values (only keys that were set)."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        raw[key] = value
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, value = (p.strip() for p in item.split("=", 1))
        raw[key] = value
    out = {}
    for key, value in raw.items():
        if key not in KEYS:
            raise ConfigError(key, "unknown configuration key")
        out[key] = _parse(KEYS[key][0], key, value)
    return out


@dataclass
class RunConfig:
    values: dict
    field: HurstField = None
    grid: Grid = None

    def __getitem__(self, key):
        if key in self.values:
            return self.values[key]
        return KEYS[key][1]

    @property
    def d(self) -> int:
        return self.field.d

    def digest_payload(self) -> dict:
        """Everything that determines the numbers; excludes output location."""
        return {k: v for k, v in sorted(self.values.items()) if k != "output_dir"}


def _broadcast(vals, d, key):
    arr = np.asarray(vals, dtype=float)
    if arr.size == 1:
        return np.full(d, float(arr[0]))
    if arr.size != d:
        raise ConfigError(key, f"expected 1 or {d} values, got {arr.size}")
    return arr


def build_field(cfg: dict) -> HurstField:
    kind = cfg.get("hurst.kind")
    if kind is None:
        raise ConfigError("hurst.kind", "missing (one of " + ", ".join(HURST_KINDS) + ")")
    if kind not in HURST_KINDS:
        raise ConfigError("hurst.kind", f"unknown kind {kind!r}")
    for k in cfg:
        if k.startswith("hurst.") and k[6:] not in _HURST_PARAMS[kind] | {
                "kind", "alpha", "beta", "gamma", "holder_const"}:
            raise ConfigError(k, f"not a parameter of hurst.kind = {kind}")
    for p in _HURST_PARAMS[kind]:
        if f"hurst.{p}" not in cfg and not (kind == "sinusoidal" and p == "frequency"):
            raise ConfigError(f"hurst.{p}", f"required for hurst.kind = {kind}")

    d = cfg.get("d")
    try:
        if kind == "constant":
            h = cfg["hurst.h"]
            d = d or len(h)
            base = HurstField.constant(_broadcast(h, d, "hurst.h"))
        elif kind == "affine":
            b = cfg["hurst.base"]
            d = d or len(b)
            slopes = np.asarray(cfg["hurst.slopes"], dtype=float)
            if slopes.shape == (1, d) or slopes.shape == (1, 1):
                slopes = np.diag(_broadcast(slopes.ravel(), d, "hurst.slopes"))
            base = HurstField.affine(_broadcast(b, d, "hurst.base"), slopes)
        elif kind == "sinusoidal":
            mean = cfg["hurst.mean"]
            d = d or max(len(mean), len(cfg["hurst.amplitude"]))
            base = HurstField.sinusoidal(
                _broadcast(mean, d, "hurst.mean"),
                _broadcast(cfg["hurst.amplitude"], d, "hurst.amplitude"),
                _broadcast(cfg.get("hurst.frequency", [1.0]), d, "hurst.frequency"))
        else:
            axes = [np.asarray(a) for a in cfg["hurst.axes"]]
            d = len(axes)
            values = np.asarray(cfg["hurst.values"]).reshape(tuple(a.size for a in axes) + (d,))
            spec = GriddedTable(tuple(axes), values)
            base = HurstField(spec, alpha=values.reshape(-1, d).min(axis=0),
                              beta=values.reshape(-1, d).max(axis=0), gamma=1.0,
                              holder_const=1.0)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("hurst", str(exc)) from None

    try:
        return HurstField(
            base.spec,
            alpha=_broadcast(cfg["hurst.alpha"], d, "hurst.alpha") if "hurst.alpha" in cfg else base.alpha,
            beta=_broadcast(cfg["hurst.beta"], d, "hurst.beta") if "hurst.beta" in cfg else base.beta,
            gamma=cfg.get("hurst.gamma", base.gamma),
            holder_const=cfg.get("hurst.holder_const", base.holder_const),
        )
    except ValueError as exc:
        raise ConfigError("hurst.alpha/beta/gamma/holder_const", str(exc)) from None


def build_grid(cfg: dict, d: int) -> Grid:
    res = cfg.get("grid.resolution", KEYS["grid.resolution"][1])
    lo = cfg.get("grid.lo", KEYS["grid.lo"][1])
    hi = cfg.get("grid.hi", KEYS["grid.hi"][1])
    res = _broadcast(res, d, "grid.resolution").astype(int)
    lo = _broadcast(lo, d, "grid.lo")
    hi = _broadcast(hi, d, "grid.hi")
    if np.any(res < 1):
        raise ConfigError("grid.resolution", "must be >= 1")
    if np.any(lo < 0) or np.any(hi > 1) or np.any(lo > hi):
        raise ConfigError("grid.lo/grid.hi", "extents must satisfy 0 <= lo <= hi <= 1")
    return Grid(tuple(np.linspace(lo[i], hi[i], res[i]) if res[i] > 1 else np.array([hi[i]])
                      for i in range(d)))


def load_config(text: str, overrides=()) -> RunConfig:
    cfg = parse_config_text(text, overrides)
    field = build_field(cfg)
    grid = build_grid(cfg, field.d)
    checks = {
        "n": lambda v: v >= 1,
        "reps": lambda v: v >= 0,
        "seed": lambda v: v >= 0,
        "fdd.tol": lambda v: v > 0,
        "cov.tolerance": lambda v: v > 0,
        "check.moment_m": lambda v: v in (2, 4, 6, 8),
        "check.hurst_resolution": lambda v: v >= 2,
    }
    for key, ok in checks.items():
        if key in cfg and not ok(cfg[key]):
            raise ConfigError(key, f"value {cfg[key]!r} out of range")
    if "n_list" in cfg and (len(cfg["n_list"]) < 3 or min(cfg["n_list"]) < 1):
        raise ConfigError("n_list", "need at least 3 positive resolutions")
    if cfg.get("dist", "rademacher") not in DISTRIBUTIONS:
        raise ConfigError("dist", f"expected one of {DISTRIBUTIONS}")
    if cfg.get("format", "csv") != "csv":
        raise ConfigError("format", "only csv is supported")
    if "fdd.points" in cfg:
        pts = np.asarray(cfg["fdd.points"])
        if pts.ndim != 2 or pts.shape[1] != field.d:
            raise ConfigError("fdd.points", f"expected points of dimension {field.d}")
        coeffs = cfg.get("fdd.coeffs", [1.0] * len(pts))
        if len(coeffs) != len(pts):
            raise ConfigError("fdd.coeffs", "need one coefficient per point")
    return RunConfig(cfg, field, grid)
