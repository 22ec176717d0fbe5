"""Grid sizes and tolerances shared by the solvers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class SolverConfig:
    portfolio_grid: int = 4001
    r_cap: float = 1.0 - 1e-6
    reinsurance_grid: int = 4001
    frechet_grid: int = 20001
    root_scan_steps: int = 1000
    root_xtol: float = 1e-10
    refine_xtol: float = 1e-10
    # optimal K within this of 1 means every contract is worth 0
    indifference_tol: float = 1e-9

    def with_overrides(self, **kw) -> "SolverConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONFIG = SolverConfig()
