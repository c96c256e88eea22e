"""Closed-form KPZ scaling calculus for step-start exclusion currents.

Everything here is deterministic arithmetic: the current-density and
fluctuation-scale constants, the hydrodynamic strong-law rate, the
position-form constants, and the inversion that maps a scaled position v
and fluctuation coordinate s onto the particle-rank fraction sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ScalingParameters",
    "ScalingRangeError",
    "invert_sigma",
    "kpz_constants",
    "m_of",
    "scaling_constants",
    "sigma_series",
    "strong_law_density",
]

_CBRT2_INV4 = 2.0 ** (-4.0 / 3.0)


class ScalingRangeError(ValueError):
    """No admissible rank fraction sigma in (0, 1) for the given (v, s, t)."""


def scaling_constants(v: float) -> tuple[float, float]:
    """Current density constant a1 and fluctuation scale a2 at scaled position v.

    For v < 0 the observation site sits on the positive axis, where the
    total current is the left-of-site particle count minus the site index;
    that shift lowers a1 by |v| while a2 is unchanged.
    """
    if not abs(v) < 1.0:
        raise ValueError(f"scaled position must satisfy |v| < 1, got {v}")
    a1 = 0.25 * (1.0 - v) ** 2
    if v < 0.0:
        a1 -= -v
    a2 = _CBRT2_INV4 * (1.0 - v * v) ** (2.0 / 3.0)
    return a1, a2


def strong_law_density(c: float, gamma: float) -> float:
    """Almost-sure limit of current/time at site -c*t for drift gamma."""
    if gamma <= 0.0:
        raise ValueError(f"drift gamma must be positive, got {gamma}")
    if not 0.0 <= c <= gamma:
        raise ValueError(f"speed c must lie in [0, gamma], got c={c}, gamma={gamma}")
    return (gamma - c) ** 2 / (4.0 * gamma)


def kpz_constants(sigma: float) -> tuple[float, float]:
    """Position-form constants (c1, c2) for rank fraction sigma in (0, 1)."""
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    root = math.sqrt(sigma)
    c1 = -1.0 + 2.0 * root
    c2 = sigma ** (-1.0 / 6.0) * (1.0 - root) ** (2.0 / 3.0)
    return c1, c2


def sigma_series(v: float, s: float, t: float) -> float:
    """Two-term large-t expansion of the rank fraction sigma(v, s, t)."""
    if not abs(v) < 1.0:
        raise ValueError(f"scaled position must satisfy |v| < 1, got {v}")
    if t <= 0.0:
        raise ValueError(f"time parameter must be positive, got {t}")
    lead = ((1.0 - v) / 2.0) ** 2
    return lead - s * _CBRT2_INV4 * (1.0 - v * v) ** (2.0 / 3.0) * t ** (-2.0 / 3.0)


def _position_gap(u: float, v: float, eps: float) -> float:
    # g(u) = c1(u^2) + s*c2(u^2)*t^{-2/3} + v written in u = sqrt(sigma);
    # eps = s * t^{-2/3}.  Root of g is the rank fraction we want.
    return 2.0 * u - 1.0 + v + eps * u ** (-1.0 / 3.0) * (1.0 - u) ** (2.0 / 3.0)


def _position_gap_prime(u: float, eps: float) -> float:
    return 2.0 + eps * (
        -(1.0 / 3.0) * u ** (-4.0 / 3.0) * (1.0 - u) ** (2.0 / 3.0)
        - (2.0 / 3.0) * u ** (-1.0 / 3.0) * (1.0 - u) ** (-1.0 / 3.0)
    )


def invert_sigma(v: float, s: float, t: float) -> float:
    """Rank fraction sigma in (0, 1) such that -v*t = c1*t + s*c2*t^{1/3}.

    Solved in u = sqrt(sigma) by Newton iteration seeded with the series
    value and safeguarded by bisection on a bracket built around the
    physical branch (the root that continues sigma = ((1-v)/2)^2 at s = 0).
    A second, spurious sign change exists near sigma = 0 when s > 0 where
    the correction term alone balances the linear part; the bracket search
    walks down from the s = 0 root so it can never land on that branch.
    """
    if not abs(v) < 1.0:
        raise ValueError(f"scaled position must satisfy |v| < 1, got {v}")
    if t <= 0.0:
        raise ValueError(f"time parameter must be positive, got {t}")

    u0 = (1.0 - v) / 2.0
    if s == 0.0:
        return u0 * u0

    tiny = 1e-12
    eps = s * t ** (-2.0 / 3.0)
    series = sigma_series(v, s, t)
    u_seed = math.sqrt(min(max(series, tiny), 1.0 - tiny))

    if s > 0.0:
        # Root lies below u0; march down geometrically until the gap goes
        # negative.  Failure to find a sign change before u hits 0 means the
        # correction term dominates everywhere: out of the asymptotic range.
        hi = u0
        step = max(u0 - u_seed, 1e-8)
        lo = None
        prev = u0
        for _ in range(80):
            cand = u0 - step
            if cand <= tiny:
                raise ScalingRangeError(
                    f"no rank fraction in (0, 1) for v={v}, s={s}, t={t}: "
                    "s * t^(-2/3) is too large"
                )
            if _position_gap(cand, v, eps) < 0.0:
                lo, hi = cand, prev
                break
            prev = cand
            step *= 2.0
        if lo is None:
            raise ScalingRangeError(
                f"no rank fraction in (0, 1) for v={v}, s={s}, t={t}: "
                "bracket search exhausted"
            )
    else:
        # Root lies above u0 and the gap is strictly increasing there, so a
        # bracket always exists before u = 1.
        lo = u0
        hi = None
        step = max(u_seed - u0, 1e-8)
        prev = u0
        for _ in range(80):
            cand = u0 + step
            if cand >= 1.0 - tiny:
                cand = 1.0 - tiny
            if _position_gap(cand, v, eps) > 0.0:
                lo, hi = prev, cand
                break
            if cand >= 1.0 - tiny:
                raise ScalingRangeError(
                    f"no rank fraction in (0, 1) for v={v}, s={s}, t={t}"
                )
            prev = cand
            step *= 2.0
        if hi is None:
            raise ScalingRangeError(
                f"no rank fraction in (0, 1) for v={v}, s={s}, t={t}"
            )

    u = min(max(u_seed, lo + 0.25 * (hi - lo) * 0.0), hi)
    if not lo < u < hi:
        u = 0.5 * (lo + hi)
    for _ in range(200):
        g = _position_gap(u, v, eps)
        if g < 0.0:
            lo = u
        else:
            hi = u
        if abs(g) <= 1e-15:
            break
        dg = _position_gap_prime(u, eps)
        u_next = u - g / dg if dg != 0.0 else 0.5 * (lo + hi)
        if not lo < u_next < hi:
            u_next = 0.5 * (lo + hi)
        if abs(u_next - u) <= 1e-17:
            u = u_next
            break
        u = u_next

    sigma = u * u
    residual = -v - (-1.0 + 2.0 * u + eps * u ** (-1.0 / 3.0) * (1.0 - u) ** (2.0 / 3.0))
    if abs(residual) > 1e-13:
        raise ArithmeticError(
            f"sigma inversion failed to converge: residual {residual:.3e}"
        )
    return sigma


def m_of(v: float, s: float, t: float) -> int:
    """Particle rank m = round(a1*t - a2*s*t^{1/3}) for the position form.

    The leading coefficient here is the position-form density ((1-v)/2)^2
    for every |v| < 1.  It intentionally does not carry the v < 0 current
    shift of :func:`scaling_constants`: the rank of a tagged particle does
    not depend on how the current at a positive site is counted.
    """
    if not abs(v) < 1.0:
        raise ValueError(f"scaled position must satisfy |v| < 1, got {v}")
    if t <= 0.0:
        raise ValueError(f"time parameter must be positive, got {t}")
    a1 = 0.25 * (1.0 - v) ** 2
    a2 = _CBRT2_INV4 * (1.0 - v * v) ** (2.0 / 3.0)
    m = round(a1 * t - a2 * s * t ** (1.0 / 3.0))
    if m < 1:
        raise ValueError(
            f"rank m={m} below 1: fluctuation coordinate s={s} is outside the "
            f"particle range at t={t}"
        )
    return int(m)


@dataclass(frozen=True)
class ScalingParameters:
    """Bundle of the scaled coordinates and every derived constant."""

    v: float
    s: float
    t: float
    a1: float
    a2: float
    sigma: float
    c1: float
    c2: float
    m: int

    @classmethod
    def from_vst(cls, v: float, s: float, t: float) -> "ScalingParameters":
        a1, a2 = scaling_constants(v)
        sigma = invert_sigma(v, s, t)
        c1, c2 = kpz_constants(sigma)
        return cls(v=v, s=s, t=t, a1=a1, a2=a2, sigma=sigma, c1=c1, c2=c2,
                   m=m_of(v, s, t))
