"""Chi-square fits of front profiles and model comparison.

The decay of the interpolated feature fraction along the mean gradient-line
distances is fitted both by a straight line (closed-form least squares) and
by the erfc front 1/2 erfc((d - s0) kappa / 2) (Nelder-Mead).  Chi-square is
the plain sum of squared residuals (no per-point uncertainties are
available), reduced by n - 2 for either model.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .special import erfc


class FittingError(ValueError):
    """Fit input or convergence failure.

    A ``best`` attribute carries the best iterate when convergence fails.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class FitPoints:
    """Mean gradient-line distances paired with the levels they belong to."""

    distances: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        lv = np.asarray(self.levels, dtype=float)
        if d.ndim != 1 or d.shape != lv.shape:
            raise FittingError("distances and levels must be matching 1-d arrays")
        if (np.diff(d) < 0).any():
            raise FittingError("distances must be nondecreasing")
        if not np.allclose(np.diff(lv), -0.1, atol=1e-9):
            raise FittingError("levels must decrease in steps of 0.1")
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "levels", lv)

    def __len__(self):
        return len(self.distances)


def points_from_stats(stats) -> FitPoints:
    """FitPoints from a FrontStats (mean distances vs their levels)."""
    return FitPoints(distances=np.asarray(stats.mean_distance),
                     levels=np.asarray(stats.levels))


@dataclass(frozen=True)
class FitResult:
    model: str                 # "linear" | "erfc"
    params: dict[str, float]   # linear: slope, intercept; erfc: kappa, s0
    chi2: float
    reduced_chi2: float
    dof: int
    residuals: np.ndarray

    def predict(self, d):
        d = np.asarray(d, dtype=float)
        if self.model == "linear":
            out = self.params["intercept"] + self.params["slope"] * d
        else:
            kappa, s0 = self.params["kappa"], self.params["s0"]
            out = np.vectorize(
                lambda v: 0.5 * erfc((v - s0) * kappa / 2.0))(d)
        if d.ndim == 0:
            return float(out)
        return out


def fit_linear(points: FitPoints) -> FitResult:
    """Ordinary least squares of level against distance, closed form."""
    if len(points) < 3:
        raise FittingError("at least 3 points are required")
    d, lv = points.distances, points.levels
    dm, lm = d.mean(), lv.mean()
    sxx = float(np.sum((d - dm) ** 2))
    if sxx < 1e-12:
        raise FittingError("degenerate distance spread")
    slope = float(np.sum((d - dm) * (lv - lm)) / sxx)
    intercept = float(lm - slope * dm)
    residuals = lv - (intercept + slope * d)
    chi2 = float(np.sum(residuals ** 2))
    dof = len(points) - 2
    return FitResult(model="linear",
                     params={"slope": slope, "intercept": intercept},
                     chi2=chi2, reduced_chi2=chi2 / dof, dof=dof,
                     residuals=residuals)


# 1/2 erfc(x) passes 0.75 / 0.25 at x = -/+ 0.476936... ; the quantile span
# of the data then pins the initial kappa
_QUANTILE_X = 0.47693627620446987
_SIMPLEX_TOL = 1e-10


def _level_crossing(points: FitPoints, level: float) -> float:
    """Distance at which the (monotone) level sequence crosses ``level``."""
    d, lv = points.distances, points.levels
    if lv[0] <= level:
        return float(d[0])
    for i in range(len(lv) - 1):
        if lv[i] >= level >= lv[i + 1]:
            frac = (lv[i] - level) / (lv[i] - lv[i + 1])
            return float(d[i] + frac * (d[i + 1] - d[i]))
    return float(d[-1])


def fit_erfc(points: FitPoints) -> FitResult:
    """Fit level = 1/2 erfc((d - s0) kappa / 2) by Nelder-Mead chi-square."""
    if len(points) < 4:
        raise FittingError("at least 4 points are required")
    d, lv = points.distances, points.levels

    def objective(p):
        kappa, s0 = p
        pred = np.array([0.5 * erfc((v - s0) * kappa / 2.0) for v in d])
        return float(np.sum((lv - pred) ** 2))

    span = _level_crossing(points, 0.25) - _level_crossing(points, 0.75)
    kappa0 = 4.0 * _QUANTILE_X / span if span > 1e-9 else 0.1
    s00 = _level_crossing(points, 0.5)

    best = None
    for init in ((kappa0, s00), (1.3 * kappa0, s00 + 0.5)):
        res = minimize(objective, init, method="Nelder-Mead",
                       options={"xatol": _SIMPLEX_TOL, "fatol": _SIMPLEX_TOL,
                                "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
        if res.success:
            best = res
            break
    kappa, s0 = map(float, best.x)
    pred = np.array([0.5 * erfc((v - s0) * kappa / 2.0) for v in d])
    residuals = lv - pred
    chi2 = float(np.sum(residuals ** 2))
    dof = len(points) - 2
    result = FitResult(model="erfc", params={"kappa": kappa, "s0": s0},
                       chi2=chi2, reduced_chi2=chi2 / dof, dof=dof,
                       residuals=residuals)
    if not best.success:
        raise FittingError(
            f"erfc fit did not converge after restart: {best.message}",
            best=result)
    return result


def derived_quantities(fit: FitResult, tau: float) -> dict[str, float | None]:
    """Front slope k(tau), width 1/k(tau), and (erfc only) diffusivity."""
    if tau <= 0:
        raise FittingError("tau must be positive")
    if fit.model == "linear":
        k = abs(fit.params["slope"])
        if k < 1e-12:
            raise FittingError("zero slope: no front width defined")
        return {"k_tau": k, "w_fit": 1.0 / k, "eta": None}
    kappa = fit.params["kappa"]
    if abs(kappa) < 1e-12:
        raise FittingError("zero kappa: no front width defined")
    k = abs(kappa) / (2.0 * math.sqrt(math.pi))
    return {"k_tau": k, "w_fit": 1.0 / k, "eta": 1.0 / (kappa ** 2 * tau)}


# relative closeness of reduced chi-squares below which neither model is
# preferred (Table-style values are quoted to ~2 significant figures)
TIE_RTOL = 0.05


@dataclass(frozen=True)
class ComparisonRow:
    feature: str
    n: int
    linear_chi2: float | None
    erfc_chi2: float | None
    width_km: float | None
    favored: str   # "linear" | "erfc" | "both" | the single supplied model


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("feature,N,linear_red_chi2,erfc_red_chi2,width_km,favored\n")
        for r in self.rows:
            cells = [r.feature, str(r.n),
                     "" if r.linear_chi2 is None else f"{r.linear_chi2:.5f}",
                     "" if r.erfc_chi2 is None else f"{r.erfc_chi2:.5f}",
                     "" if r.width_km is None else f"{r.width_km:.2f}",
                     r.favored]
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{'feature':<22}{'N':>4}{'linear':>10}{'erfc':>10}"
                 f"{'w (km)':>9}"]
        for r in self.rows:
            lin = "" if r.linear_chi2 is None else f"{r.linear_chi2:.5f}"
            erf = "" if r.erfc_chi2 is None else f"{r.erfc_chi2:.5f}"
            if r.favored in ("linear", "both"):
                lin += "*"
            if r.favored in ("erfc", "both"):
                erf += "*"
            w = "" if r.width_km is None else f"{r.width_km:.2f}"
            lines.append(f"{r.feature:<22}{r.n:>4}{lin:>10}{erf:>10}{w:>9}")
        return "\n".join(lines) + "\n"


def compare_models(entries) -> ComparisonTable:
    """Table-style comparison of linear vs erfc reduced chi-squares.

    ``entries`` maps (feature, N) to a dict with optional "linear" / "erfc"
    FitResults (or bare reduced chi-square floats) and an optional "width"
    in km.  The favored model is the one with the lower reduced chi-square;
    values within TIE_RTOL of each other flag both.
    """
    rows = []
    for (feature, n), entry in entries.items():
        lin = entry.get("linear")
        erf = entry.get("erfc")
        lin_chi = lin.reduced_chi2 if isinstance(lin, FitResult) else lin
        erf_chi = erf.reduced_chi2 if isinstance(erf, FitResult) else erf
        width = entry.get("width")
        if lin_chi is None and erf_chi is None:
            raise FittingError(f"no fits supplied for {feature!r} at N={n}")
        if lin_chi is None:
            favored = "erfc"
        elif erf_chi is None:
            favored = "linear"
        elif math.isclose(lin_chi, erf_chi, rel_tol=TIE_RTOL, abs_tol=1e-12):
            favored = "both"
        elif lin_chi < erf_chi:
            favored = "linear"
        else:
            favored = "erfc"
        rows.append(ComparisonRow(feature=feature, n=n, linear_chi2=lin_chi,
                                  erfc_chi2=erf_chi, width_km=width,
                                  favored=favored))
    return ComparisonTable(rows=tuple(rows))
