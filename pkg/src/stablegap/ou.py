"""Exact results for the linear drift b(x) = -x.

Both SDEs then solve in closed form: the stationary law of the stable-driven
equation is the law of alpha^(-1/alpha) L_1 and the Brownian one is
N(0, I/2), i.e. the law of 2^(-1/2) B_1.  That makes this model the one place
where the W1 gap has exact handles: a closed-form lower bound with the
(2-alpha) rate, and the transient characteristic function at every t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InvariantError
from .rng import as_generator
from .sampling import StableModel, sample_stable_increment
from .specfun import log_gamma, mean_norm_prefactor, phi
from .wasserstein import EmpiricalMeasure


@dataclass(frozen=True)
class OuStationaryLaw:
    """Stationary law of the OU equation under one of the two noises.

    kind "stable" freezes the law of alpha^(-1/alpha) L_1 (needs alpha);
    kind "gaussian" freezes N(0, I/2), the law of 2^(-1/2) B_1.
    """

    d: int
    kind: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if self.kind == "stable":
            if self.alpha is None or not 0.0 < self.alpha <= 2.0:
                raise DomainError("stable stationary law needs alpha in (0,2]")
        elif self.kind == "gaussian":
            if self.alpha is not None:
                raise DomainError("gaussian stationary law takes no alpha")
        else:
            raise DomainError(f"unknown kind {self.kind!r}")

    @property
    def scale(self) -> float:
        if self.kind == "gaussian":
            return 2.0 ** -0.5
        return self.alpha ** (-1.0 / self.alpha)


def ou_stationary_sample(law: OuStationaryLaw, n: int, rng) -> EmpiricalMeasure:
    """n exact iid draws from the stationary law (no burn-in error)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gen = as_generator(rng)
    if law.kind == "gaussian":
        pts = law.scale * gen.standard_normal((n, law.d))
    else:
        model = StableModel(d=law.d, alpha=law.alpha)
        pts = law.scale * sample_stable_increment(model, 1.0, gen, size=n)
    return EmpiricalMeasure(points=pts)


def ou_transient_char(xi, t: float, x, alpha: float):
    """Characteristic function of X_t started at x under the stable noise:

        E exp(i<xi, X_t>) = exp(i<xi, e^(-t) x>) exp(-(1-e^(-alpha t)) |xi|^alpha / (2 alpha))

    valid for alpha in (0,2] (alpha=2 gives the Gaussian OU bridge of
    variance (1-e^(-2t))/2).  Returns (re, im).
    """
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0,2], got {alpha}")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    norm_xi = float(np.linalg.norm(xi))
    # -expm1(-alpha t) = 1 - e^(-alpha t), accurate for small t
    damp = math.exp(-(-math.expm1(-alpha * t)) * norm_xi ** alpha / (2.0 * alpha))
    phase = float(xi @ x) * math.exp(-t)
    return damp * math.cos(phase), damp * math.sin(phase)


def ou_w1_lower_exact(d: int, alpha: float) -> float:
    """Exact lower bound on W1 between the two stationary laws:

        (2 Gamma((d+1)/2) / (sqrt(pi) Gamma(d/2))) |phi(alpha) - phi(2)|

    with phi(x) = (2x)^(-1/x) Gamma(1-1/x); the bound is the gap between the
    two mean norms and vanishes linearly in (2-alpha).

    Evaluated independently through the raw gamma expression and through
    specfun.phi; the two must agree to 1e-12 relative to the mean-norm scale
    (internal redundancy).
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if not 1.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (1,2), got {alpha}")
    pref = mean_norm_prefactor(d)
    via_phi = pref * abs(phi(alpha) - phi(2.0))
    gamma_term = (2.0 * alpha) ** (-1.0 / alpha) * math.exp(log_gamma(1.0 - 1.0 / alpha))
    via_gamma = pref * abs(gamma_term - 0.5 * math.exp(log_gamma(0.5)))
    # the difference cancels as alpha -> 2, so rounding noise must be
    # measured against the terms being subtracted, not against the result
    if abs(via_phi - via_gamma) > 1e-12 * pref * max(gamma_term, 1.0):
        raise InvariantError(
            f"lower-bound evaluation paths disagree: {via_phi!r} vs {via_gamma!r}"
        )
    return via_phi


def gammalower_check(alpha_grid) -> tuple:
    """(c1_hat, c2_hat): min and max over the grid of |phi(alpha)-phi(2)|/(2-alpha).

    Both must be strictly positive and finite, which is the desk-scale form
    of the statement that the lower bound is exactly of order (2-alpha)."""
    grid = [float(a) for a in alpha_grid]
    if not grid:
        raise ValueError("gammalower_check requires a nonempty grid")
    ratios = []
    for a in grid:
        if not 1.0 < a < 2.0:
            raise DomainError(f"grid values must lie in (1,2), got {a}")
        ratios.append(abs(phi(a) - phi(2.0)) / (2.0 - a))
    c1, c2 = min(ratios), max(ratios)
    if not (c1 > 0.0 and math.isfinite(c2)):
        raise InvariantError(f"rate ratio degenerate: ({c1}, {c2})")
    return c1, c2
