"""Growth-rate profiles and experiment reports.

A profile is a short sequence of ``(n, value)`` pairs.  ``log(value)`` is
fitted against ``1``, ``log log n`` and ``log n``; the simplest model wins
unless a richer one cuts the residual sum of squares by more than 10%.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

GROWTH_MODELS = ("constant", "log", "power")
SIMPLER_MODEL_PREFERENCE = 0.9
MIN_DIVERGENCE_SPAN = 16  # four doublings of n
_RSS_FLOOR = 1e-24


@dataclass(frozen=True)
class GrowthFit:
    model: str
    intercept: float
    slope: float
    rss: float


def fit_growth(ns, values) -> dict[str, GrowthFit]:
    """Least-squares fits of ``log(value)`` for every growth model."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.maximum(np.asarray(values, dtype=float), np.finfo(float).tiny))
    fits = {}
    regressors = {
        "constant": None,
        "log": np.log(np.maximum(x, 1e-300)),
        "power": x,
    }
    for name, reg in regressors.items():
        if reg is None:
            c = float(np.mean(y))
            rss = float(np.sum((y - c) ** 2))
            fits[name] = GrowthFit(name, c, 0.0, rss)
            continue
        design = np.column_stack([np.ones_like(reg), reg])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        rss = float(np.sum((y - design @ coef) ** 2))
        fits[name] = GrowthFit(name, float(coef[0]), float(coef[1]), rss)
    return fits


def select_model(fits: dict[str, GrowthFit]) -> str:
    best = "constant"
    for name in GROWTH_MODELS[1:]:
        if fits[best].rss <= _RSS_FLOOR:
            break
        if fits[name].rss < SIMPLER_MODEL_PREFERENCE * fits[best].rss:
            best = name
    return best


@dataclass(frozen=True)
class NormProfile:
    """Values of some norm (or ratio of norms) along increasing degrees."""

    ns: tuple
    values: tuple
    label: str = ""
    fits: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ns = tuple(int(n) for n in self.ns)
        values = tuple(float(v) for v in self.values)
        if len(ns) != len(values) or not ns:
            raise ValueError("a profile needs matching, nonempty n and value sequences")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("profile degrees must be strictly increasing")
        if ns[0] < 2:
            raise ValueError("profile degrees must be >= 2 (log log n is fitted)")
        if not all(math.isfinite(v) and v >= 0 for v in values):
            raise ValueError("profile values must be finite and nonnegative")
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "fits", fit_growth(ns, values) if len(ns) >= 2 else {})

    @property
    def model(self) -> str:
        return select_model(self.fits) if len(self.ns) >= 3 else "constant"

    @property
    def exponent(self) -> float:
        """Slope of the power-law fit, recorded whatever model is selected."""
        return self.fits["power"].slope if self.fits else 0.0

    @property
    def residual(self) -> float:
        return self.fits[self.model].rss if self.fits else 0.0

    @property
    def span(self) -> float:
        return self.ns[-1] / self.ns[0]

    def is_bounded(self, tol: float = 0.05) -> bool:
        return self.model == "constant" or self.exponent <= tol

    def classify(self, tol: float = 0.05) -> str:
        """``bounded``, ``diverges`` or ``inconclusive`` (too few doublings)."""
        if self.is_bounded(tol):
            return "bounded"
        if self.span < MIN_DIVERGENCE_SPAN:
            return "inconclusive"
        return "diverges"

    def is_decreasing(self, jitter: float = 0.1, floor: float = 0.0) -> bool:
        v = self.values
        return all(b <= (1.0 + jitter) * a or max(a, b) <= floor for a, b in zip(v, v[1:]))

    def converges(self, factor: float = 1e-3, jitter: float = 0.1, floor: float = 1e-13) -> bool:
        """Values fall below ``factor`` times the first one and never rise by more than ``jitter``."""
        v = self.values
        small = v[-1] <= factor * v[0] or v[-1] <= floor
        return small and self.is_decreasing(jitter, floor)

    def rows(self) -> list[dict]:
        return [
            {
                "n": n,
                "value": v,
                "model": self.model,
                "exponent": self.exponent,
                "residual": self.residual,
            }
            for n, v in zip(self.ns, self.values)
        ]

    def summary(self) -> dict:
        return {
            "label": self.label,
            "model": self.model,
            "exponent": self.exponent,
            "residual": self.residual,
            "fits": {k: asdict(f) for k, f in self.fits.items()},
        }

    def to_csv(self, fh=None) -> str:
        return rows_to_csv(self.rows(), fh)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def rows_to_csv(rows: list[dict], fh=None) -> str:
    """CSV with a header line, ',' separators, LF endings and 17 significant digits."""
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        keys = list(rows[0].keys())
        writer.writerow(keys)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in keys])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


VERDICTS = ("PASS", "FAIL", "RECORDED")


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    table: list
    verdict: str
    fit: dict | None = None
    seed: int | None = None
    seed_scheme: str | None = None
    wall_time: float | None = None
    notes: dict = field(default_factory=dict)
    profiles: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "table": self.table,
            "fit": self.fit,
            "verdict": self.verdict,
            "seed": self.seed,
            "seed_scheme": self.seed_scheme,
            "wall_time": self.wall_time,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        """Strict JSON; infinities and NaNs become the strings ``"inf"``, ``"-inf"``, ``"nan"``."""
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True, allow_nan=False)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")
