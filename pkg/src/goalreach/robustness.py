"""Table reproduction and robust-vs-nominal sweeps for the layer reinsurance solvers.

Each sweep point solves the worst-case problem (robust contract) and the
comonotone problem (nominal contract), then scores each contract in the
other scenario.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .config import DEFAULT_CONFIG, SolverConfig
from .dist_core import DomainError, TruncatedNormal, TruncatedShiftedPareto
from .distortion import DistortionPricing, PowerDistortion
from .reinsurance import (
    ReinsuranceProblem,
    ReinsuranceSolution,
    comonotone_map,
    evaluate_comonotone,
    evaluate_worst_case,
    solve_comonotone,
    solve_no_background,
    solve_with_background,
)

log = logging.getLogger(__name__)

GOAL_GRID = (15.0, 15.5, 16.0, 16.5, 17.0, 17.5, 18.0, 18.5, 19.0)
LOADING_GRID = (0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2)
SHAPE_GRID = (2.0, 2.2, 2.4, 2.6, 2.8, 3.0, 3.2, 3.4, 3.6, 3.8, 4.0)

CSV_HEADER = ("param", "pi_star", "value", "attach", "detach", "worst_of_nominal", "nominal_of_robust")
TABLE_HEADER = ("xi", "pi_star", "value", "attach", "detach", "case")

# Published rows (xi, premium, value, attach, detach). None marks "any contract".
REFERENCE_TABLES: dict[str, tuple[tuple, ...]] = {
    "t1": (
        (15.0, 4.4356, 0.9690, 0.5644, 8.7320),
        (15.5, 3.9356, 0.9047, 0.5644, 6.8680),
        (16.0, 3.4356, 0.8048, 0.5644, 5.5817),
        (16.5, 2.9356, 0.7714, 0.5644, 4.5439),
        (17.0, 2.4356, 0.6946, 0.5644, 3.6608),
        (17.5, 1.9356, 0.6090, 0.5644, 2.8882),
        (18.0, 1.4356, 0.5135, 0.5644, 2.2003),
        (18.5, 0.9356, 0.4069, 0.5644, 1.5803),
        (19.0, 0.4356, 0.2881, 0.5644, 1.0165),
    ),
    "t2": (
        (15.0, 3.0064, 0.7051, 0.5644, 4.6801),
        (15.5, 2.5712, 0.6300, 0.5644, 3.8884),
        (16.0, 2.1416, 0.5476, 0.5644, 3.1950),
        (16.5, 1.7162, 0.4571, 0.5644, 2.5772),
        (17.0, 1.2945, 0.3577, 0.5644, 2.0197),
        (17.5, 0.8775, 0.2488, 0.5644, 1.5120),
        # printed attachment 0.5664 is a misprint of z0
        (18.0, 0.4657, 0.1295, 0.5644, 1.0493),
        (18.5, None, 0.0, None, None),
        (19.0, None, 0.0, None, None),
    ),
    "t3": (
        (15.0, 3.4372, 0.8410, 0.5644, 5.5853),
        (15.5, 3.1080, 0.7960, 0.5644, 4.8811),
        (16.0, 2.7708, 0.7469, 0.5644, 4.2383),
        (16.5, 2.4296, 0.6936, 0.5644, 3.6509),
        (17.0, 1.2955, 0.6360, 0.5644, 3.1133),
        (17.5, 1.7480, 0.5744, 0.5644, 2.6212),
        (18.0, 1.4131, 0.5090, 0.5644, 2.1710),
        (18.5, 1.0860, 0.4402, 0.5644, 1.7604),
        (19.0, 0.7701, 0.3690, 0.5644, 1.3879),
    ),
}
TABLE_TOLERANCE = {"t1": 2e-3, "t2": 3e-3, "t3": 3e-3}


@dataclass(frozen=True)
class BaseConfig:
    """Market and risk parameters shared by every table and sweep."""

    w0: float = 20.0
    xi: float = 17.0
    loading: float = 0.1
    theta: float = 0.5
    beta: float = 10.0
    gamma: float = 3.0
    M: float = 10.0
    bg_lower: float = -5.0
    bg_upper: float = 5.0

    def with_overrides(self, **kw) -> "BaseConfig":
        return replace(self, **{k: float(v) for k, v in kw.items() if v is not None})

    def problem(self, **kw) -> ReinsuranceProblem:
        c = self.with_overrides(**kw)
        F_X = TruncatedShiftedPareto(c.beta, c.gamma, c.M)
        F0 = TruncatedNormal(c.bg_lower, c.bg_upper)
        pricing = DistortionPricing(PowerDistortion(c.theta), c.loading)
        return ReinsuranceProblem(c.w0, c.xi, pricing, F_X, F0, comonotone_map(F_X, F0))

    def to_dict(self) -> dict:
        return asdict(self)


BASE = BaseConfig()


@dataclass(frozen=True)
class TableRow:
    xi: float
    pi_star: float
    value: float
    attach: float
    detach: float
    case: str

    @classmethod
    def from_solution(cls, xi: float, s: ReinsuranceSolution) -> "TableRow":
        return cls(xi, s.premium, s.value, s.contract.attach, s.contract.detach, s.case.value)


_TABLE_SOLVERS = {"t1": solve_no_background, "t2": solve_with_background, "t3": solve_comonotone}


def run_table(
    which: str,
    base: BaseConfig = BASE,
    cfg: SolverConfig = DEFAULT_CONFIG,
    goals: Sequence[float] = GOAL_GRID,
) -> list[TableRow]:
    """One row per goal level for ``t1`` (no background), ``t2`` (worst case) or ``t3`` (comonotone)."""
    if which not in _TABLE_SOLVERS:
        raise DomainError(f"unknown table {which!r}; expected one of {sorted(_TABLE_SOLVERS)}")
    solver = _TABLE_SOLVERS[which]
    rows = []
    for xi in goals:
        p = base.problem(xi=xi)
        try:
            s = solver(p, cfg)
        except Exception as e:
            raise type(e)(f"{which} row xi={xi}: {e}") from e
        rows.append(TableRow.from_solution(float(xi), s))
    return rows


class SweepParameter(str, enum.Enum):
    GOAL = "goal"
    LOADING = "loading"
    SHAPE = "shape"


_PARAM_FIELD = {SweepParameter.GOAL: "xi", SweepParameter.LOADING: "loading", SweepParameter.SHAPE: "gamma"}
DEFAULT_GRIDS = {SweepParameter.GOAL: GOAL_GRID, SweepParameter.LOADING: LOADING_GRID, SweepParameter.SHAPE: SHAPE_GRID}


@dataclass(frozen=True)
class SweepSpec:
    parameter: SweepParameter
    values: tuple[float, ...]
    base: BaseConfig = BASE

    def __post_init__(self):
        object.__setattr__(self, "parameter", SweepParameter(self.parameter))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise DomainError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise DomainError("sweep values must be strictly increasing")

    @classmethod
    def default(cls, parameter: str, base: BaseConfig = BASE) -> "SweepSpec":
        p = SweepParameter(parameter)
        return cls(p, DEFAULT_GRIDS[p], base)


@dataclass(frozen=True)
class SweepRow:
    param_value: float
    robust: ReinsuranceSolution | None
    nominal: ReinsuranceSolution | None
    worst_of_nominal: float = float("nan")
    nominal_of_robust: float = float("nan")
    error: str | None = None

    @property
    def worst_gap(self) -> float:
        """Worst-case value of the robust contract minus that of the nominal one."""
        return self.robust.value - self.worst_of_nominal

    @property
    def nominal_gap(self) -> float:
        """Nominal value of the nominal contract minus that of the robust one."""
        return self.nominal.value - self.nominal_of_robust

    def to_dict(self) -> dict:
        return {
            "param_value": self.param_value,
            "robust": self.robust.to_dict() if self.robust else None,
            "nominal": self.nominal.to_dict() if self.nominal else None,
            "worst_of_nominal": self.worst_of_nominal,
            "nominal_of_robust": self.nominal_of_robust,
            "error": self.error,
        }


@dataclass(frozen=True)
class SweepReport:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]
    config: dict = field(default_factory=dict)

    @property
    def ok_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if r.error is None]

    def to_dict(self) -> dict:
        return {
            "parameter": self.spec.parameter.value,
            "values": list(self.spec.values),
            "base": self.spec.base.to_dict(),
            "config": self.config,
            "rows": [r.to_dict() for r in self.rows],
        }


def sweep_point(base: BaseConfig, parameter: SweepParameter, value: float, cfg: SolverConfig) -> SweepRow:
    p = base.problem(**{_PARAM_FIELD[parameter]: value})
    robust = solve_with_background(p, cfg)
    nominal = solve_comonotone(p, cfg)
    return SweepRow(
        param_value=value,
        robust=robust,
        nominal=nominal,
        worst_of_nominal=evaluate_worst_case(p, nominal.contract, cfg),
        nominal_of_robust=evaluate_comonotone(p, robust.contract),
    )


def run_sweep(s: SweepSpec, cfg: SolverConfig = DEFAULT_CONFIG) -> SweepReport:
    """Solve both scenarios at every sweep value; a failing point is recorded and skipped."""
    rows = []
    for v in s.values:
        try:
            rows.append(sweep_point(s.base, s.parameter, v, cfg))
        except Exception as e:  # one bad point must not sink the sweep
            log.warning("sweep %s=%s failed: %s", s.parameter.value, v, e)
            rows.append(SweepRow(v, None, None, error=f"{type(e).__name__}: {e}"))
    return SweepReport(s, tuple(rows), cfg.to_dict())


# ---------------------------------------------------------------------------
# serialisation


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return f"{x:.6g}"


def _write_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def table_csv(rows: Sequence[TableRow]) -> str:
    return _write_csv(TABLE_HEADER, [(r.xi, r.pi_star, r.value, r.attach, r.detach, r.case) for r in rows])


def sweep_csv(report: SweepReport, contract: str = "robust") -> str:
    """CSV of one contract's own solution plus both cross-scenario scores.

    ``contract`` picks which solution fills ``pi_star,value,attach,detach``.
    """
    if contract not in ("robust", "nominal"):
        raise DomainError("contract must be 'robust' or 'nominal'")
    out = []
    for r in report.rows:
        s = getattr(r, contract)
        if s is None:
            out.append((r.param_value, None, None, None, None, None, None))
            continue
        c = s.contract
        out.append((r.param_value, s.premium, s.value, c.attach, c.detach, r.worst_of_nominal, r.nominal_of_robust))
    return _write_csv(CSV_HEADER, out)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_sweep(report: SweepReport, out_dir: Path, stem: str, formats: Sequence[str] = ("csv", "json")) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    if "csv" in formats:
        for contract in ("robust", "nominal"):
            path = out_dir / f"{stem}_{contract}.csv"
            path.write_text(sweep_csv(report, contract))
            paths.append(path)
    if "json" in formats:
        path = out_dir / f"{stem}.json"
        path.write_text(dump_json(report.to_dict()))
        paths.append(path)
    return paths
