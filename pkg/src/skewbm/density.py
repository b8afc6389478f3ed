"""Closed-form joint law of a skew Brownian motion and its local time at 0.

A skew Brownian motion with skewness ``alpha`` behaves like standard
Brownian motion away from the interface at 0, but excursions from 0 go
upward with probability ``alpha``.  Writing ``B_t`` for the position at
time ``t``, ``L_t`` for the symmetric local time accumulated at 0, and
``x`` for the start, the law of ``(B_t, L_t)`` has

* a continuous part supported on ``{ell >= 0}``, with density

      2*alpha     * (ell + |y| + |x|) / sqrt(2 pi t^3) * exp(-(ell+|y|+|x|)^2 / 2t)   for y > 0,
      2*(1-alpha) * (ell + |y| + |x|) / sqrt(2 pi t^3) * exp(-(ell+|y|+|x|)^2 / 2t)   for y < 0,

* and an atom at ``ell = 0`` carried by the paths that never reach 0,
  with y-density ``phi_t(y-x) - phi_t(y+x)`` on the starting side.

Everything below is an elementary consequence of those two displays:
marginals, the atom's total mass, and the quadrature used to confirm that
the whole thing integrates to one.

The y < 0 branch coefficient is ``2*(1-alpha)``: this is the unique choice
that keeps the density nonnegative and makes the law invariant under the
reflection ``(x, y, alpha) -> (-x, -y, 1-alpha)``; a sign-flipped variant
``2*(alpha-1)`` fails both requirements.

The continuous density is discontinuous in ``y`` at the interface (the
one-sided limits satisfy ``(1-alpha) f(0+) = alpha f(0-)``), so evaluation
exactly at ``y = 0`` requires an explicit ``side``; there is deliberately
no silent default.

All functions broadcast over numpy arrays and are pure: no shared state,
safe under concurrent callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erf, ndtr

from .errors import DomainError, QuadratureError

__all__ = [
    "SkewParams",
    "QueryPoint",
    "DensityValue",
    "QuadratureSpec",
    "gauss_kernel",
    "joint_density_continuous",
    "atom_weight",
    "survival_probability",
    "skew_marginal_density",
    "skew_marginal_cdf",
    "local_time_marginal_density",
    "normalization_mass",
    "evaluate_joint",
]

_LOG_UNDERFLOW = -700.0  # switch to log-space assembly below this exponent


@dataclass(frozen=True)
class SkewParams:
    """Skewness parameter, strictly inside (0, 1).

    The boundary values 0 and 1 (reflected limits) are intentionally
    rejected here; the lattice walk accepts them directly for its
    reflection sanity checks.
    """

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a) or not 0.0 < a < 1.0:
            raise DomainError(f"alpha must lie strictly in (0, 1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class QueryPoint:
    """Evaluation point (start x, horizon t, terminal y, local-time level ell)."""

    x: float
    t: float
    y: float
    ell: float = 0.0

    def __post_init__(self):
        if not self.t > 0.0:
            raise DomainError(f"t must be positive, got {self.t!r}")
        if not self.ell >= 0.0:
            raise DomainError(f"ell must be nonnegative, got {self.ell!r}")


@dataclass(frozen=True)
class DensityValue:
    """Joint density split into its two parts.

    ``continuous`` is per dy dell; ``atom`` is the coefficient of the
    point mass at ell = 0, per dy.
    """

    continuous: float
    atom: float


def _alpha_of(s):
    """Skewness as a float or broadcastable array, validated to (0, 1)."""
    a = s.alpha if isinstance(s, SkewParams) else s
    a = np.asarray(a, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(a <= 0.0) or np.any(a >= 1.0):
        raise DomainError(f"alpha must lie strictly in (0, 1), got {s!r}")
    return a if a.ndim else float(a)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0.0):
        raise DomainError("t must be positive and finite")
    return t


def gauss_kernel(z, t):
    """Heat kernel ``exp(-z^2/(2t)) / sqrt(2 pi t)``.

    Strictly positive, even in ``z``.  Raises :class:`DomainError` for
    ``t <= 0``.
    """
    t = _check_t(t)
    z = np.asarray(z, dtype=float)
    return np.exp(-z * z / (2.0 * t)) / np.sqrt(2.0 * np.pi * t)


def _ramp_density(coef, u, t):
    """``coef * u / sqrt(2 pi t^3) * exp(-u^2 / 2t)`` with graceful underflow.

    When the exponent drops below -700 the product is assembled in log
    space so ratio tests deep in the tails see a consistent value instead
    of a spuriously rounded zero.
    """
    expo = -u * u / (2.0 * t)
    norm = np.sqrt(2.0 * np.pi * t**3)
    val = coef * u * np.exp(expo) / norm
    small = expo < _LOG_UNDERFLOW
    if np.any(small):
        with np.errstate(divide="ignore"):
            logv = np.log(coef) + np.log(u) + expo - np.log(norm)
        val = np.where(small, np.exp(logv), val)
    return val


def joint_density_continuous(x, y, ell, t, s, side=None):
    """Continuous part of the joint (position, local time) density.

    Parameters
    ----------
    x, y, ell, t : array_like
        Start, terminal position, local-time level (>= 0), horizon (> 0).
    s : SkewParams or float
        Skewness alpha in (0, 1).
    side : {"above", "below", "avg"}, optional
        Policy for entries with ``y == 0`` exactly, where the density is
        discontinuous.  "above"/"below" evaluate the one-sided limit;
        "avg" returns the alpha-weighted average
        ``alpha*f(0-) + (1-alpha)*f(0+) = 4 alpha (1-alpha) g``.
        Without a side, ``y == 0`` raises :class:`DomainError`.

    Returns
    -------
    ndarray or float
        Nonnegative density value(s) per dy dell.
    """
    alpha = _alpha_of(s)
    t = _check_t(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ell = np.asarray(ell, dtype=float)
    if np.any(ell < 0.0):
        raise DomainError("ell must be nonnegative")

    at_zero = y == 0.0
    if side is None:
        if np.any(at_zero):
            raise DomainError(
                "the joint density is discontinuous at y=0; pass side="
                "'above', 'below' or 'avg'"
            )
        sgn = np.sign(y)
    elif side == "above":
        sgn = np.where(at_zero, 1.0, np.sign(y))
    elif side == "below":
        sgn = np.where(at_zero, -1.0, np.sign(y))
    elif side == "avg":
        sgn = np.sign(y)
    else:
        raise DomainError(f"unknown side {side!r}")

    coef = np.where(sgn > 0.0, 2.0 * alpha, 2.0 * (1.0 - alpha))
    if side == "avg":
        coef = np.where(at_zero, 4.0 * alpha * (1.0 - alpha), coef)
    u = ell + np.abs(y) + np.abs(x)
    return _ramp_density(coef, u, t)


def atom_weight(x, y, t):
    """Density (per dy) of the never-hit point mass at ell = 0.

    Equals ``phi_t(y-x) - phi_t(y+x)`` when y is on the starting side and
    0 otherwise (a path ending across the interface must have touched it).
    Independent of alpha; identically 0 for x = 0.
    """
    t = _check_t(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    same_side = x * y > 0.0
    # phi_t(y-x) - phi_t(y+x) = phi_t(y-x) * (1 - exp(-2xy/t)); expm1 keeps
    # precision when 2xy/t is small, the log branch when phi itself underflows.
    d = y - x
    expo = -d * d / (2.0 * t)
    factor = -np.expm1(np.where(same_side, -2.0 * x * y / t, 0.0))
    val = np.exp(expo) / np.sqrt(2.0 * np.pi * t) * factor
    small = same_side & (expo < _LOG_UNDERFLOW)
    if np.any(small):
        with np.errstate(divide="ignore"):
            logv = expo + np.log(factor) - 0.5 * np.log(2.0 * np.pi * t)
        val = np.where(small, np.exp(logv), val)
    return np.where(same_side, val, 0.0)


def survival_probability(x, t):
    """P(no visit to 0 before t) from start x: ``erf(|x| / sqrt(2t))``.

    This is the total mass of the ell = 0 atom; monotone increasing in
    |x| and decreasing in t.
    """
    t = _check_t(t)
    x = np.asarray(x, dtype=float)
    return erf(np.abs(x) / np.sqrt(2.0 * t))


def skew_marginal_density(x, y, t, s):
    """Transition density of the position alone.

    ``phi_t(y-x) + sign(y) (2 alpha - 1) phi_t(|y|+|x|)`` — obtained by
    integrating the continuous part over ell and adding the atom.  At
    ``y = 0`` exactly, ``sign(0) = 0`` yields the unweighted average of
    the two one-sided limits (a measure-zero convention).
    """
    alpha = _alpha_of(s)
    t = _check_t(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return gauss_kernel(y - x, t) + np.sign(y) * (2.0 * alpha - 1.0) * gauss_kernel(
        np.abs(y) + np.abs(x), t
    )


def skew_marginal_cdf(x, y, t, s):
    """CDF in y of :func:`skew_marginal_density` (used by KS checks)."""
    alpha = _alpha_of(s)
    t = _check_t(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    st = np.sqrt(t)
    ax = np.abs(x)
    c = 2.0 * alpha - 1.0
    base = ndtr((y - x) / st)
    neg = -c * (1.0 - ndtr((ax - np.minimum(y, 0.0)) / st))
    pos = np.where(y > 0.0, c * (ndtr((y + ax) / st) - ndtr(ax / st)), 0.0)
    return base + neg + pos


def local_time_marginal_density(x, t, ell):
    """Continuous part of the local-time law: ``2 phi_t(ell + |x|)``.

    The alpha dependence of the joint law cancels in the y-integral
    (2*alpha + 2*(1-alpha) = 2), so this takes no skewness argument at
    all.  The full law adds ``survival_probability(x, t)`` as an atom at
    ell = 0.  At x = 0 this is the half-normal law of |B_t|.
    """
    t = _check_t(t)
    ell = np.asarray(ell, dtype=float)
    if np.any(ell < 0.0):
        raise DomainError("ell must be nonnegative")
    return 2.0 * gauss_kernel(ell + np.abs(np.asarray(x, dtype=float)), t)


@dataclass(frozen=True)
class QuadratureSpec:
    """Domain truncation and tolerance knobs for :func:`normalization_mass`.

    The integration window extends ``sigma_mult`` standard deviations past
    the linear shift |x| of the density's argument.  The analytic bound on
    the truncated tail must come out below ``tail_tol`` or the operation
    refuses to report a value.
    """

    sigma_mult: float = 10.0
    epsabs: float = 1e-10
    epsrel: float = 1e-10
    tail_tol: float = 1e-9
    limit: int = 200


def _tail_bound(x, t, sigma_mult):
    # Continuous part beyond u = U: int 2(u-|x|)(u/t) phi_t(u) du <= 2[U phi_t(U) + 1 - Phi(U/sqrt t)]
    u_star = sigma_mult * np.sqrt(t) + abs(x)
    cont = 2.0 * (u_star * gauss_kernel(u_star, t) + 1.0 - ndtr(u_star / np.sqrt(t)))
    atom = 1.0 - ndtr(sigma_mult)
    return float(cont + atom)


_GL64 = np.polynomial.legendre.leggauss(64)


def _gl_panels(lo, breaks):
    """Gauss-Legendre nodes/weights over consecutive panels [lo, b1, b2...]."""
    nodes, weights = [], []
    a = lo
    for b in breaks:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes.append(mid + half * _GL64[0])
        weights.append(half * _GL64[1])
        a = b
    return np.concatenate(nodes), np.concatenate(weights)


def normalization_mass(x, t, s, quad: QuadratureSpec = QuadratureSpec()):
    """Total probability mass by quadrature; should be 1.

    The y-integral is adaptive (QUADPACK, split at the interface); for
    each y node the ell-integral uses fixed Gauss-Legendre panels sized to
    the Gaussian decay scale, evaluated vectorised.  Raises
    :class:`QuadratureError` when the analytic tail bound for the chosen
    truncation exceeds ``quad.tail_tol``.
    """
    alpha = _alpha_of(s)
    x = float(x)
    t = float(_check_t(t))

    tail = _tail_bound(x, t, quad.sigma_mult)
    if tail > quad.tail_tol:
        raise QuadratureError(
            f"truncation tail estimate {tail:.3e} exceeds tolerance {quad.tail_tol:.1e};"
            " increase sigma_mult"
        )

    st = np.sqrt(t)
    y_max = quad.sigma_mult * st + abs(x)
    l_max = quad.sigma_mult * st
    l_nodes, l_weights = _gl_panels(
        0.0, (min(2.0 * st, l_max), min(5.0 * st, l_max), l_max)
    )

    def inner(yv, side):
        vals = joint_density_continuous(x, yv, l_nodes, t, alpha, side=side)
        return float(l_weights @ vals)

    below, _ = integrate.quad(
        lambda yv: inner(yv, "below"), -y_max, 0.0,
        epsabs=quad.epsabs, epsrel=quad.epsrel, limit=quad.limit,
    )
    above, _ = integrate.quad(
        lambda yv: inner(yv, "above"), 0.0, y_max,
        epsabs=quad.epsabs, epsrel=quad.epsrel, limit=quad.limit,
    )

    atom = 0.0
    if x > 0.0:
        atom, _ = integrate.quad(
            lambda yv: float(atom_weight(x, yv, t)), 0.0, y_max,
            epsabs=quad.epsabs, epsrel=quad.epsrel, limit=quad.limit,
        )
    elif x < 0.0:
        atom, _ = integrate.quad(
            lambda yv: float(atom_weight(x, yv, t)), -y_max, 0.0,
            epsabs=quad.epsabs, epsrel=quad.epsrel, limit=quad.limit,
        )

    return float(below + above + atom)


def evaluate_joint(point: QueryPoint, s: SkewParams, side=None) -> DensityValue:
    """Typed single-point evaluation of both parts of the joint law."""
    cont = joint_density_continuous(
        point.x, point.y, point.ell, point.t, s, side=side
    )
    atom = atom_weight(point.x, point.y, point.t)
    return DensityValue(continuous=float(cont), atom=float(atom))
