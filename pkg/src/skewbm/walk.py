"""Skew random walk on a lattice: the path-level oracle.

A walk on the grid ``h * Z`` with ``h = 1/sqrt(n)`` and time step ``1/n``
converges weakly to skew Brownian motion with drift: away from 0 it steps
``+h`` with probability ``(1 + v*h)/2``, and from 0 it steps ``+h`` with
probability alpha (the drift bias is deliberately not applied at the
interface — drift enters the dynamics off the interface only).

Recorded per path:

* ``terminal``   — final lattice position,
* ``local_time`` — ``h`` times the number of lattice epochs at site 0,
  including the starting epoch; this estimator reproduces the symmetric
  local-time normalisation (at x=0, v=0 its mean matches E|B_t| =
  sqrt(2t/pi) to O(h^2)),
* ``occupation_pos`` — left-endpoint time count of strictly positive
  sites, with epochs at site 0 credited the fractional weight alpha (the
  same split the forward step probabilities use; set by the tie rule
  below).

The starting point is snapped to the nearest lattice site (O(h) error).
Each path consumes its own counter-based stream (``rng.child(path
index)``), so batch results do not depend on chunking or execution order;
batches should space their base stream ids at least ``n_paths`` apart.

The skewness argument accepts the closed (0, 1) boundary values 0 and 1
here (unlike :class:`~skewbm.density.SkewParams`) so the reflected-walk
limits can be exercised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import SkewParams
from .errors import DomainError
from .rng import RngStream

__all__ = ["DriftSpec", "PathRecord", "simulate_path", "simulate_batch", "simulate_batch_arrays"]

# occupation tie rule: an epoch at site 0 contributes alpha * dt to the
# positive-side occupation (and, symmetrically, (1-alpha) * dt to the
# negative side).  Pass zero_weight=0.0 for a strict "positive sites only"
# sensitivity run.
DEFAULT_ZERO_WEIGHT = "alpha"

_CHUNK_UNIFORM_BUDGET = 32_000_000  # float32 entries per chunk (~128 MB)


@dataclass(frozen=True)
class DriftSpec:
    """Drift velocity and the derived skew coupling gamma = (2 alpha - 1) v.

    gamma is carried for reporting; the walk itself consumes v and alpha
    separately.  Its elastic-interface reading only makes sense when
    gamma >= 0, which is not assumed anywhere.
    """

    v: float
    gamma: float

    def __post_init__(self):
        if abs(self.gamma) > abs(self.v) + 1e-12:
            raise DomainError(
                f"gamma must satisfy |gamma| <= |v| (got v={self.v}, gamma={self.gamma})"
            )

    @classmethod
    def from_velocity(cls, v: float, s) -> "DriftSpec":
        alpha = _walk_alpha(s)
        return cls(v=float(v), gamma=(2.0 * alpha - 1.0) * float(v))


@dataclass(frozen=True)
class PathRecord:
    """Summary of one simulated path."""

    terminal: float
    local_time: float
    occupation_pos: float
    n_steps: int


def _walk_alpha(s) -> float:
    a = s.alpha if isinstance(s, SkewParams) else float(s)
    if not np.isfinite(a) or not 0.0 <= a <= 1.0:
        raise DomainError(f"walk alpha must lie in [0, 1], got {a!r}")
    return a


def _validate(x, t, alpha, v, n, zero_weight):
    if not t > 0.0:
        raise DomainError("t must be positive")
    n = int(n)
    if n < 100:
        raise DomainError(f"need at least 100 steps per unit time, got {n}")
    h = 1.0 / np.sqrt(n)
    if abs(v) * h >= 1.0:
        raise DomainError(
            f"drift bias |v|*h = {abs(v) * h:.3g} >= 1; increase n for drift v={v}"
        )
    if zero_weight == "alpha":
        w0 = alpha
    else:
        w0 = float(zero_weight)
        if not 0.0 <= w0 <= 1.0:
            raise DomainError("occupation zero-weight must lie in [0, 1]")
    return float(x), float(t), float(v), n, h, w0


def _run_chunk(m0, n_steps, h, n, alpha, p_up, w0, uniforms):
    """Walk a chunk of paths; uniforms has shape (n_steps, n_paths)."""
    n_paths = uniforms.shape[1]
    pos = np.full(n_paths, m0, dtype=np.int64)
    visits = (pos == 0).astype(np.int64)
    occ_pos = np.zeros(n_paths, dtype=np.int64)
    occ_zero = np.zeros(n_paths, dtype=np.int64)
    for k in range(n_steps):
        at0 = pos == 0
        occ_pos += pos > 0
        occ_zero += at0
        thr = np.where(at0, alpha, p_up)
        pos += np.where(uniforms[k] < thr, 1, -1)
        visits += pos == 0
    terminal = pos * h
    local_time = visits * h
    # divide by the integer step rate (not by h*h) so a fully-occupied
    # horizon comes out as exactly n_steps/n
    occupation = (occ_pos + w0 * occ_zero) / n
    return terminal, local_time, occupation


def simulate_batch_arrays(x, t, s, v, n, n_paths, rng: RngStream,
                          zero_weight=DEFAULT_ZERO_WEIGHT):
    """Simulate ``n_paths`` independent walks; returns arrays.

    Returns ``(terminal, local_time, occupation_pos, n_steps)`` with the
    first three indexed by path number.  Path j draws from
    ``rng.child(j)``, so the output is reproducible and independent of
    chunk boundaries.
    """
    alpha = _walk_alpha(s)
    x, t, v, n, h, w0 = _validate(x, t, alpha, v, n, zero_weight)
    n_paths = int(n_paths)
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")

    n_steps = max(1, int(round(n * t)))
    m0 = int(round(x / h))
    p_up = 0.5 * (1.0 + v * h)

    terminal = np.empty(n_paths)
    local_time = np.empty(n_paths)
    occupation = np.empty(n_paths)

    chunk = max(1, min(n_paths, _CHUNK_UNIFORM_BUDGET // n_steps))
    buf = np.empty((n_steps, chunk), dtype=np.float32)
    for lo in range(0, n_paths, chunk):
        hi = min(lo + chunk, n_paths)
        u = buf[:, : hi - lo]
        for j in range(lo, hi):
            u[:, j - lo] = rng.child(j).generator().random(n_steps, dtype=np.float32)
        term, loc, occ = _run_chunk(m0, n_steps, h, n, alpha, p_up, w0, u)
        terminal[lo:hi] = term
        local_time[lo:hi] = loc
        occupation[lo:hi] = occ

    return terminal, local_time, occupation, n_steps


def simulate_batch(x, t, s, v, n, n_paths, rng: RngStream,
                   zero_weight=DEFAULT_ZERO_WEIGHT):
    """List-of-records version of :func:`simulate_batch_arrays`."""
    term, loc, occ, n_steps = simulate_batch_arrays(
        x, t, s, v, n, n_paths, rng, zero_weight
    )
    return [
        PathRecord(float(term[j]), float(loc[j]), float(occ[j]), n_steps)
        for j in range(len(term))
    ]


def simulate_path(x, t, s, v, n, rng: RngStream,
                  zero_weight=DEFAULT_ZERO_WEIGHT) -> PathRecord:
    """Single walk; identical to path 0 of a batch run with the same stream."""
    return simulate_batch(x, t, s, v, n, 1, rng, zero_weight)[0]
