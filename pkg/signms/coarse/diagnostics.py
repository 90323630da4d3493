# ====================================================
# Solve Diagnostics
# ----------------------------------------------------
# - Resolution ratio rho = k^2 H^2 / (mu_msh Lambda)
# - SolveReport: one experiment row (errors, gaps,
#   flags, status) plus the timings kept apart from it
# ====================================================

from dataclasses import asdict, dataclass, field

import numpy as np

from signms import config
from signms.errors import ConfigurationError


def resolution_ratio(k, H, lambda_gap, mu_msh=24.0):
    if not (k > 0 and H > 0 and mu_msh > 0):
        raise ConfigurationError(f"k, H and mu_msh must be positive (k={k}, H={H}, mu_msh={mu_msh})")
    if not lambda_gap > 0:
        return float("inf")
    return float(k ** 2 * H ** 2 / (mu_msh * lambda_gap))


def is_resolved(rho, threshold=config.RESOLUTION_THRESHOLD):
    return bool(np.isfinite(rho) and rho < threshold)


@dataclass
class SolveReport:
    experiment: str
    method: str
    H: float
    m: int
    l_star: int
    k: float
    n_fine: int
    seed: int = 0
    energy_rel: float = float("nan")
    l2_rel: float = float("nan")
    energy_rel_exact: float = float("nan")
    l2_rel_exact: float = float("nan")
    lambda_gap: float = float("nan")
    upsilon: float = float("nan")
    rho: float = float("nan")
    rho_flagged: bool = False
    f_sinv_norm: float = float("nan")
    decay_rate: float = float("nan")
    fine_rtol: float = config.FINE_RTOL
    status: str = "ok"
    error: str = ""
    timings: dict = field(default_factory=dict)

    def failed(self, exc):
        self.status = "failed"
        self.error = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        return self

    def flag_resolution(self, threshold=config.RESOLUTION_THRESHOLD):
        self.rho_flagged = not is_resolved(self.rho, threshold)
        return self

    def as_row(self):
        row = asdict(self)
        row.pop("timings")
        row["lambda"] = row.pop("lambda_gap")
        return row

    def timing_row(self):
        row = {key: getattr(self, key) for key in ("experiment", "method", "H", "m", "l_star")}
        row.update({f"seconds_{stage}": round(seconds, 3) for stage, seconds in self.timings.items()})
        return row
