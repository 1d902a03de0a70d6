"""Closed-form diffusion profiles and their transforms.

One-dimensional erfc and piecewise-linear front solutions (with optional
convection), the radially symmetric Schmidt profile for diffusivity
``eta_hat * a / r``, the fundamental (point/line source) solutions, and the
inverse problem of recovering a Boltzmann-variable diffusivity from a
sampled profile.

Distances are in km, times in years, diffusivities in km^2/yr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .special import GAMMA_ONE_THIRD, erfc, exp_cubed_integral


class ModelError(ValueError):
    """Parameters outside a model's domain."""


# ---------------------------------------------------------------------------
# parameter containers


@dataclass(frozen=True)
class ConvectionLaw:
    """Reduced-time displacement law f(t') of the convection term.

    kind "none" pins f to 0; "linear" is f(t') = t'; "special" is
    f(t') = t' * exp((tau/theta)(1 - t')), which advances, stalls at
    t = theta and then regresses.
    """

    kind: str = "none"
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("none", "linear", "special"):
            raise ModelError(f"unknown convection law {self.kind!r}")
        if self.kind == "special":
            if self.theta is None or self.theta <= 0:
                raise ModelError("special convection law requires theta > 0")


@dataclass(frozen=True)
class ErfcParams:
    """Parameters of the erfc front: eta = 1/(kappa^2 tau) is enforced."""

    tau: float
    eta: float | None = None
    kappa: float | None = None
    s0: float = 0.0
    lam: float = 0.0
    f_kind: ConvectionLaw = field(default_factory=ConvectionLaw)

    def __post_init__(self):
        if self.tau <= 0:
            raise ModelError("tau must be positive")
        if self.eta is None and self.kappa is None:
            raise ModelError("one of eta or kappa is required")
        if self.kappa is None:
            if self.eta <= 0:
                raise ModelError("eta must be positive")
            object.__setattr__(self, "kappa",
                               1.0 / math.sqrt(self.eta * self.tau))
        elif self.eta is None:
            if self.kappa <= 0:
                raise ModelError("kappa must be positive")
            object.__setattr__(self, "eta",
                               1.0 / (self.kappa ** 2 * self.tau))
        else:
            if not math.isclose(self.eta, 1.0 / (self.kappa ** 2 * self.tau),
                                rel_tol=1e-9):
                raise ModelError(
                    "inconsistent parameters: eta must equal 1/(kappa^2 tau)")


@dataclass(frozen=True)
class LinearParams:
    """Parameters of the piecewise-linear front."""

    chi: float
    tau: float
    s1: float = 0.0
    lam: float = 0.0
    f_kind: ConvectionLaw = field(default_factory=ConvectionLaw)

    def __post_init__(self):
        if self.chi <= 0:
            raise ModelError("chi must be positive")
        if self.tau <= 0:
            raise ModelError("tau must be positive")


@dataclass(frozen=True)
class SchmidtParams:
    """Radial source with diffusivity eta_hat * a / r."""

    eta_hat: float
    a: float
    center: tuple[float, float] = (0.0, 0.0)
    t_trigger: float = 0.0

    def __post_init__(self):
        if self.eta_hat <= 0 or self.a <= 0:
            raise ModelError("eta_hat and a must be positive")


# ---------------------------------------------------------------------------
# convection


def convection_f(law: ConvectionLaw, t: float, tau: float):
    """Displacement f and its reduced-time derivative df/dt' at time t."""
    tp = t / tau
    if law.kind == "none":
        return 0.0, 0.0
    if law.kind == "linear":
        return tp, 1.0
    if law.kind == "special":
        e = math.exp((tau / law.theta) * (1.0 - tp))
        return tp * e, (1.0 - t / law.theta) * e
    raise ModelError(f"unknown convection law {law.kind!r}")


def _shift(params, t: float) -> float:
    """Convection displacement relative to the fitted epoch t = tau."""
    f_t, _ = convection_f(params.f_kind, t, params.tau)
    f_1, _ = convection_f(params.f_kind, params.tau, params.tau)
    return params.lam * (f_t - f_1)


# ---------------------------------------------------------------------------
# one-dimensional fronts


def erfc_profile(s, t: float, eta: float):
    """Constant-diffusivity front 1/2 erfc(s / (2 sqrt(eta t)))."""
    if t <= 0:
        raise ModelError("t must be positive")
    if eta <= 0:
        raise ModelError("eta must be positive")
    s = np.asarray(s, dtype=float)
    out = np.vectorize(lambda v: 0.5 * erfc(v / (2.0 * math.sqrt(eta * t))))(s)
    if s.ndim == 0:
        return float(out)
    return out


def erfc_evolution(s, t: float, params: ErfcParams, corrected: bool = True):
    """Time-evolving erfc front with convection.

    In corrected grouping (default) the argument is
    s - s0 - lam*(f(t/tau) - f(1)); the literal grouping
    s - (s0 + lam) f(t/tau) + lam f(1) is retained behind the flag.  Both
    coincide at t = tau, where the profile reduces to the fitted
    1/2 erfc((s - s0) kappa / 2).
    """
    if t <= 0:
        raise ModelError("t must be positive")
    f_t, _ = convection_f(params.f_kind, t, params.tau)
    f_1, _ = convection_f(params.f_kind, params.tau, params.tau)
    if corrected:
        offset = params.s0 + params.lam * (f_t - f_1)
    else:
        offset = (params.s0 + params.lam) * f_t - params.lam * f_1
    scale = params.kappa / (2.0 * math.sqrt(t / params.tau))
    s = np.asarray(s, dtype=float)
    out = np.vectorize(lambda v: 0.5 * erfc((v - offset) * scale))(s)
    if s.ndim == 0:
        return float(out)
    return out


def front_slope(params: LinearParams, t: float) -> float:
    """Angular coefficient k(t) = chi / (2 sqrt(t/tau))."""
    if t <= 0:
        raise ModelError("t must be positive")
    return params.chi / (2.0 * math.sqrt(t / params.tau))


def front_edges(params: LinearParams, t: float):
    """Positions (s1(t), s0(t)) of the level-1 and level-0 front edges."""
    k = front_slope(params, t)
    s1 = params.s1 + _shift(params, t)
    return s1, s1 + 1.0 / k


def linear_profile(s, t: float, params: LinearParams):
    """Piecewise-linear front: 1 behind s1(t), 0 past s0(t), linear between."""
    if t <= 0:
        raise ModelError("t must be positive")
    k = front_slope(params, t)
    s1, s0 = front_edges(params, t)
    s = np.asarray(s, dtype=float)
    out = np.clip(1.0 - k * (s - s1), 0.0, 1.0)
    out = np.where(s <= s1, 1.0, np.where(s >= s0, 0.0, out))
    if s.ndim == 0:
        return float(out)
    return out


def linear_diffusivity(s, t: float, params: LinearParams):
    """Diffusivity sustaining the linear front.

    ((s0(t) - s1(t))^2 - (s - s1(t))^2) / (4 t) across the front; zero past
    s0(t); held at the (time-independent) s1 value 1/(chi^2 tau) behind the
    front.
    """
    if t <= 0:
        raise ModelError("t must be positive")
    s1, s0 = front_edges(params, t)
    w = s0 - s1
    s = np.asarray(s, dtype=float)
    u = np.clip(s - s1, 0.0, None)
    out = np.where(s >= s0, 0.0, (w ** 2 - u ** 2) / (4.0 * t))
    if s.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# radial Schmidt solution


def schmidt_profile(r, t: float, params: SchmidtParams, literal: bool = False):
    """Radial profile of a source in diffusivity eta_hat * a / r.

    g(r, t) = 1 - (3 / Gamma(1/3)) * integral_0^u exp(-x^3) dx with
    u = r / (9 eta_hat a (t - t_trigger))^(1/3) by default; the ``literal``
    flag replaces the 9 with 3, which does not satisfy the governing radial
    diffusion equation and is kept only for comparison.
    """
    dt = t - params.t_trigger
    if dt <= 0:
        raise ModelError("t must exceed t_trigger")
    factor = 3.0 if literal else 9.0
    denom = (factor * params.eta_hat * params.a * dt) ** (1.0 / 3.0)
    r = np.asarray(r, dtype=float)
    if (r < 0).any():
        raise ModelError("r must be nonnegative")
    out = np.vectorize(
        lambda v: 1.0 - (3.0 / GAMMA_ONE_THIRD) * exp_cubed_integral(v / denom)
    )(r)
    out = np.clip(out, 0.0, 1.0)  # guard quadrature round-off at the tail
    if r.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# fundamental solutions


def fundamental_2d(x, y, t: float, eta_hat: float):
    """Unit point-source density (1/(4 pi eta t)) exp(-(x^2+y^2)/(4 eta t))."""
    if t <= 0:
        raise ModelError("t must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.exp(-(x ** 2 + y ** 2) / (4.0 * eta_hat * t)) \
        / (4.0 * math.pi * eta_hat * t)
    if x.ndim == 0 and y.ndim == 0:
        return float(out)
    return out


def line_source_profile(s, t: float, eta_hat: float):
    """Unit line-source density (1/(2 sqrt(pi eta t))) exp(-s^2/(4 eta t))."""
    if t <= 0:
        raise ModelError("t must be positive")
    s = np.asarray(s, dtype=float)
    out = np.exp(-s ** 2 / (4.0 * eta_hat * t)) \
        / (2.0 * math.sqrt(math.pi * eta_hat * t))
    if s.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# inverse problem


def recover_diffusivity(z, g, c0: float):
    """Diffusivity eta(z) sustaining a profile G(z) in the Boltzmann variable.

    eta(z) = (c0 - 2 * integral_0^z xi G'(xi) dxi) / G'(z) with trapezoidal
    integration and central-difference derivatives; c0 = eta(0) G'(0) fixes
    the boundary flux.  The profile must be strictly monotone: any region
    with |G'| <= 1e-8 is reported as an error.
    """
    z = np.asarray(z, dtype=float)
    g = np.asarray(g, dtype=float)
    if z.ndim != 1 or z.shape != g.shape or len(z) < 3:
        raise ModelError("z and g must be matching 1-d arrays of length >= 3")
    if (np.diff(z) <= 0).any():
        raise ModelError("z must be strictly increasing")
    dg = np.gradient(g, z)
    flat = np.abs(dg) <= 1e-8
    if flat.any():
        lo, hi = z[flat].min(), z[flat].max()
        raise ModelError(
            f"profile is flat (|G'| <= 1e-8) on z in [{lo:g}, {hi:g}]")
    integrand = z * dg
    integral = np.concatenate(
        [[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(z))])
    return (c0 - 2.0 * integral) / dg
