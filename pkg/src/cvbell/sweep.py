"""Parameter sweeps over squeezing and degeneracy level, and their CSV/JSON output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bell import (
    TSIRELSON,
    closed_form_correlators,
    correlators_state_picture,
    maximal_bell_value,
)
from .fock import ModeCutoff, auto_cutoff
from .parity import parity_correlators
from .pseudospin import FULL, LevelError, format_level, min_cutoff_for_level, parse_level
from .squeeze import truncation_weight

__all__ = [
    "FIELDS",
    "ConfigError",
    "NumericFailure",
    "SweepConfig",
    "MAX_AUTO_ZETA",
    "FIGURE_LEVELS",
    "figure_config",
    "run_sweep",
    "render",
    "write_atomic",
]

FIELDS = ("zeta", "level", "I", "F", "biqv", "ratio", "method", "cutoff", "truncation_weight")
FAMILIES = ("pseudospin", "parity")
METHODS = ("closed", "matrix", "both")
FORMATS = ("csv", "json")
#: largest zeta for which an automatic cutoff is accepted by the matrix method
MAX_AUTO_ZETA = 1.5
FIGURE_LEVELS = (0, 1, 2, 3, FULL)


class ConfigError(ValueError):
    """Invalid sweep configuration (CLI exit status 2)."""


class NumericFailure(ArithmeticError):
    """A sweep point could not be computed (CLI exit status 1)."""

    def __init__(self, zeta, level, reason):
        super().__init__(f"zeta={zeta:.12g} level={format_level(level)}: {reason}")
        self.zeta = zeta
        self.level = level


@dataclass
class SweepConfig:
    zeta_min: float = 0.0
    zeta_max: float = 1.5
    steps: int = 31
    levels: list = field(default_factory=lambda: [FULL])
    family: str = "pseudospin"
    method: str = "closed"
    cutoff: int | None = None  # None means automatic
    tolerance: float = 1e-8
    output: str = "-"
    format: str = "csv"
    jobs: int = 1

    def validate(self) -> "SweepConfig":
        if not (math.isfinite(self.zeta_min) and math.isfinite(self.zeta_max)):
            raise ConfigError("zeta bounds must be finite")
        if self.zeta_min < 0:
            raise ConfigError("zeta-min must be >= 0")
        if not self.zeta_max > self.zeta_min:
            raise ConfigError("zeta-max must exceed zeta-min")
        if self.steps < 2:
            raise ConfigError("steps must be >= 2")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        try:
            self.levels = sorted({parse_level(lv) for lv in self.levels})
        except LevelError as exc:
            raise ConfigError(str(exc)) from None
        if not self.levels:
            raise ConfigError("at least one level is required")
        if self.family == "parity" and self.levels != [FULL]:
            raise ConfigError("the parity family has no degeneracy levels; use --levels inf")
        if self.cutoff is not None:
            try:
                ModeCutoff(self.cutoff)
            except (TypeError, ValueError) as exc:
                raise ConfigError(str(exc)) from None
        if self.uses_matrix:
            if self.cutoff is None and self.zeta_max > MAX_AUTO_ZETA:
                raise ConfigError(
                    f"automatic cutoff is limited to zeta <= {MAX_AUTO_ZETA} for the matrix "
                    f"method; pass --cutoff explicitly (auto rule at zeta-max would give "
                    f"{auto_cutoff(self.zeta_max).n_max})"
                )
            need = max(min_cutoff_for_level(lv) for lv in self.levels)
            if self.matrix_cutoff.n_max < need:
                raise ConfigError(f"cutoff {self.matrix_cutoff.n_max} too small for the requested levels (need {need})")
        return self

    @property
    def uses_matrix(self) -> bool:
        return self.method in ("matrix", "both")

    @property
    def matrix_cutoff(self) -> ModeCutoff:
        return ModeCutoff(self.cutoff) if self.cutoff is not None else auto_cutoff(self.zeta_max)

    def grid(self) -> np.ndarray:
        return np.linspace(self.zeta_min, self.zeta_max, self.steps)


def figure_config(which: str, output: str, method: str = "closed", cutoff: int | None = None) -> SweepConfig:
    if which not in ("fig1", "fig2"):
        raise ConfigError("figure must be fig1 or fig2")
    return SweepConfig(
        zeta_min=0.0,
        zeta_max=3.0,
        steps=121,
        levels=list(FIGURE_LEVELS),
        method=method,
        cutoff=cutoff,
        output=output,
    )


def _correlators(config: SweepConfig, zeta: float, level, method: str):
    if config.family == "parity":
        if method == "closed":
            return parity_correlators(zeta, "closed_form")
        return parity_correlators(zeta, "matrix", config.matrix_cutoff)
    if method == "closed":
        return closed_form_correlators(zeta, level)
    return correlators_state_picture(zeta, level, config.matrix_cutoff)


def _point(config: SweepConfig, zeta: float, level) -> list[dict]:
    methods = ["closed", "matrix"] if config.method == "both" else [config.method]
    records = []
    try:
        for method in methods:
            pair = _correlators(config, zeta, level, method)
            value, _ = maximal_bell_value(pair)
            if method == "matrix":
                cutoff = config.matrix_cutoff
                cut, weight = cutoff.n_max, truncation_weight(zeta, cutoff)
            else:
                cut, weight = None, 0.0
            rec = {
                "zeta": zeta,
                "level": level,
                "I": pair.i_corr,
                "F": pair.f_corr,
                "biqv": value.value,
                "ratio": value.value / TSIRELSON,
                "method": method,
                "cutoff": cut,
                "truncation_weight": weight,
            }
            if not all(math.isfinite(rec[k]) for k in ("I", "F", "biqv")):
                raise NumericFailure(zeta, level, "non-finite result")
            records.append(rec)
    except NumericFailure:
        raise
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        raise NumericFailure(zeta, level, str(exc)) from exc
    if len(records) == 2:
        gap = abs(records[0]["biqv"] - records[1]["biqv"])
        allowed = max(config.tolerance, 10.0 * records[1]["truncation_weight"])
        if gap > allowed:
            raise NumericFailure(
                zeta, level, f"closed form and matrix disagree by {gap:.3g} (allowed {allowed:.3g})"
            )
    return records


def run_sweep(config: SweepConfig) -> list[dict]:
    """Records ordered by (level, zeta, method)."""
    config.validate()
    points = [(float(z), lv) for lv in config.levels for z in config.grid()]
    if config.jobs > 1:
        with ThreadPoolExecutor(config.jobs) as pool:
            chunks = list(pool.map(lambda p: _point(config, *p), points))
    else:
        chunks = [_point(config, *p) for p in points]
    return [rec for chunk in chunks for rec in chunk]


def _fmt(x: float) -> str:
    return format(x, ".12g")


def render(records: list[dict], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(FIELDS)
        for r in records:
            writer.writerow(
                [
                    _fmt(r["zeta"]),
                    format_level(r["level"]),
                    _fmt(r["I"]),
                    _fmt(r["F"]),
                    _fmt(r["biqv"]),
                    _fmt(r["ratio"]),
                    r["method"],
                    "" if r["cutoff"] is None else str(r["cutoff"]),
                    _fmt(r["truncation_weight"]),
                ]
            )
        return buf.getvalue()
    if fmt == "json":
        rows = []
        for r in records:
            row = {}
            for key in FIELDS:
                val = r[key]
                if key == "level":
                    val = "inf" if val == FULL else int(val)
                elif isinstance(val, float):
                    val = float(_fmt(val))
                row[key] = val
            rows.append(row)
        return json.dumps(rows, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".cvbell-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
