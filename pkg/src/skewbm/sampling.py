"""Exact draws from the joint (position, local time) law — no path simulation.

The sampler exploits the structure of the closed form.  Let ``u = ell +
|y| + |x|``.  Conditional on the path reaching the interface, the level
``u`` has density proportional to ``(u - |x|) * u * phi_t(u)`` on
``(|x|, inf)``, and given ``u`` the pair ``(|y|, ell)`` is uniform on the
segment ``|y| + ell = u - |x|`` with the sign of ``y`` positive with
probability alpha.  The level itself is drawn exactly through the
first-passage decomposition

    u = |x| + sqrt(t - tau) * chi3,

where ``tau`` is the first time the driving Brownian motion hits 0
(conditioned on ``tau < t``, inverted from its erfc CDF in log space so
extreme-tail starts stay accurate) and ``chi3`` is a 3-dimensional chi
variable.  Mixing first-passage against the residual Maxwell level
reproduces ``(u-|x|) u phi_t(u)`` exactly, so no rejection loop is needed
for the level.

Paths that never hit keep ``ell = 0`` and get ``y`` from the killed
density ``phi_t(y-x) - phi_t(y+x)`` on the starting side, by rejection
from a Gaussian proposal with acceptance ``1 - exp(-2|x y|/t)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtri_exp

from .density import _alpha_of, survival_probability
from .errors import DomainError, SamplerError
from .rng import RngStream

__all__ = ["JointSample", "sample_joint", "sample_joint_batch", "sample_u_given_hit"]

_LOG2 = float(np.log(2.0))
_SQRT2 = float(np.sqrt(2.0))

REJECTION_CAP = 10**6  # rounds; each round redraws every still-pending sample


@dataclass(frozen=True)
class JointSample:
    """One draw of (terminal position, local time, interface-hit flag).

    ``hit`` is False exactly when the draw came from the ell = 0 atom; in
    that case y sits on the starting side and ell == 0.
    """

    y: float
    ell: float
    hit: bool


def _sample_u(x_abs, t, g, size):
    if x_abs == 0.0:
        s_rem = np.full(size, t)
    else:
        v = g.random(size)
        # first-passage CDF F(s) = erfc(x / sqrt(2s)); draw W = V * F(t) and
        # invert in log space: erfc(z) = 2 Phi(-sqrt(2) z).
        z_t = x_abs / np.sqrt(2.0 * t)
        log_ft = _LOG2 + log_ndtr(-_SQRT2 * z_t)
        with np.errstate(divide="ignore"):
            log_w = np.log(v) + log_ft
        z_s = -ndtri_exp(log_w - _LOG2) / _SQRT2
        with np.errstate(divide="ignore"):
            s = x_abs * x_abs / (2.0 * z_s * z_s)
        s_rem = np.clip(t - s, 0.0, t)
    # residual Maxwell level: sqrt(s_rem) * chi3, chi3^2 = 2 Gamma(3/2)
    return x_abs + np.sqrt(2.0 * s_rem * g.standard_gamma(1.5, size))


def sample_u_given_hit(x_abs, t, rng: RngStream, size=None):
    """Draw the level u with density ~ (u - x_abs) u phi_t(u) on (x_abs, inf).

    Exposed for unit testing the level sampler against quadrature of the
    same density.  ``size=None`` returns a scalar.
    """
    if x_abs < 0.0:
        raise DomainError("x_abs must be nonnegative")
    if not t > 0.0:
        raise DomainError("t must be positive")
    g = rng.generator()
    u = _sample_u(float(x_abs), float(t), g, 1 if size is None else int(size))
    return float(u[0]) if size is None else u


def _sample_atom_side(x, t, g, size):
    """y from the killed density phi_t(y-x) - phi_t(y+x), restricted to sign(x)."""
    out = np.empty(size)
    todo = np.arange(size)
    sgn = 1.0 if x > 0.0 else -1.0
    sqt = np.sqrt(t)
    rounds = 0
    while todo.size:
        rounds += 1
        if rounds > REJECTION_CAP:
            raise SamplerError(
                f"atom-side rejection exceeded {REJECTION_CAP} rounds "
                f"(x={x}, t={t}, pending={todo.size})"
            )
        z = x + sqt * g.standard_normal(todo.size)
        accept_u = g.random(todo.size)
        ok = (sgn * z > 0.0) & (accept_u < -np.expm1(-2.0 * x * z / t))
        out[todo[ok]] = z[ok]
        todo = todo[~ok]
    return out


def sample_joint_batch(x, t, s, rng: RngStream, size):
    """Vectorised joint draws; returns arrays (y, ell, hit).

    The draw sequence is fixed (mixture uniforms, atom rejection, level,
    segment split, sign), so a given RngStream always reproduces the same
    batch.
    """
    alpha = _alpha_of(s)
    x = float(x)
    t = float(t)
    if not t > 0.0:
        raise DomainError("t must be positive")
    size = int(size)
    if size < 1:
        raise DomainError("size must be >= 1")

    g = rng.generator()
    p_surv = float(survival_probability(x, t))
    hit = g.random(size) >= p_surv

    y = np.empty(size)
    ell = np.zeros(size)

    n_atom = int(np.count_nonzero(~hit))
    if n_atom:
        y[~hit] = _sample_atom_side(x, t, g, n_atom)

    m = size - n_atom
    if m:
        x_abs = abs(x)
        u = _sample_u(x_abs, t, g, m)
        seg = u - x_abs
        ymag = g.random(m) * seg
        sgn = np.where(g.random(m) < alpha, 1.0, -1.0)
        y[hit] = sgn * ymag
        ell[hit] = seg - ymag  # keeps ell + |y| + |x| == u to rounding

    return y, ell, hit


def sample_joint(x, t, s, rng: RngStream) -> JointSample:
    """Single draw from the joint law (see :func:`sample_joint_batch`)."""
    y, ell, hit = sample_joint_batch(x, t, s, rng, 1)
    return JointSample(y=float(y[0]), ell=float(ell[0]), hit=bool(hit[0]))
