"""Weyl-Heisenberg covariant SICs.

Projectors are generated as the orbit of a fiducial vector under the
displacement operators ``D[p, q] = tau**(p*q) X**p Z**q`` with shift ``X``,
clock ``Z`` and ``tau = exp(i pi (d+1) / d)``. Projector ``i`` (zero-based)
corresponds to ``(p, q) = divmod(i, d)``; file formats and user-facing text
count from one, ``i = p*d + q + 1``.

Fiducials are found by minimizing the frame potential
``sum_{(p,q) != (0,0)} |<psi|D[p,q]|psi>|**4``, whose global minimum
``(d-1)/(d+1)`` is attained exactly at SIC fiducials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .hermitian import (
    TOL_NORM,
    DimensionError,
    as_state,
    complex_gaussian,
)

SEARCH_MAX_DIM = 8
DEFAULT_RESTARTS = 32
DEFAULT_TOL = 1e-13
DEFAULT_STEP = 0.1
# descent hands over to the Gauss-Newton polish at this overlap deviation;
# the polish then runs to the rounding floor so downstream identities
# (Born rule vs Urgleichung) hold near machine precision
TARGET_DEVIATION = 1e-11
POLISH_DEVIATION = 1e-15
GRAD_TOL = 1e-10
MAX_ITERATIONS = 2000
POLISH_ITERATIONS = 50
UNVERIFIED_DEVIATION = 1e-6


class SearchFailure(RuntimeError):
    """No restart of the fiducial search converged."""

    def __init__(self, message: str, report: "SearchReport"):
        super().__init__(message)
        self.report = report


@dataclass
class SicPovm:
    dim: int
    fiducial: np.ndarray
    projectors: np.ndarray  # shape (d*d, d, d)
    max_overlap_deviation: float

    @property
    def effects(self) -> np.ndarray:
        """POVM elements E_i = Pi_i / d."""
        return self.projectors / self.dim

    @property
    def vectors(self) -> np.ndarray:
        """Orbit vectors D[p,q] psi, one per row."""
        return displacement_operators(self.dim) @ self.fiducial


@dataclass
class SearchReport:
    dim: int
    seed: int
    restarts_used: int
    final_potential: float
    deviation: float
    converged: bool
    iterations: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "seed": self.seed,
            "restarts_used": self.restarts_used,
            "final_potential": self.final_potential,
            "deviation": self.deviation,
            "converged": self.converged,
        }


def _check_dim(d: int, upper: int | None = None) -> int:
    if int(d) != d or d < 2:
        raise DimensionError(f"dimension must be an integer >= 2, got {d!r}")
    if upper is not None and d > upper:
        raise DimensionError(f"dimension {d} outside supported range 2..{upper}")
    return int(d)


def shift_matrix(d: int) -> np.ndarray:
    """X |j> = |j+1 mod d>."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_matrix(d: int) -> np.ndarray:
    """Z |j> = omega**j |j>, omega = exp(2 pi i / d)."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def displacement_operator(d: int, p: int, q: int) -> np.ndarray:
    d = _check_dim(d)
    if not (0 <= p < d and 0 <= q < d):
        raise IndexError(f"displacement indices ({p}, {q}) out of range for d={d}")
    tau = np.exp(1j * np.pi * (d + 1) / d)
    x = np.linalg.matrix_power(shift_matrix(d), p)
    z = np.linalg.matrix_power(clock_matrix(d), q)
    return tau ** (p * q) * (x @ z)


@lru_cache(maxsize=None)
def _displacements(d: int) -> np.ndarray:
    ops = np.array([displacement_operator(d, p, q) for p in range(d) for q in range(d)])
    ops.setflags(write=False)
    return ops


def displacement_operators(d: int) -> np.ndarray:
    """All d*d displacement operators stacked in canonical index order."""
    return _displacements(_check_dim(d))


def potential_minimum(d: int) -> float:
    return (d - 1) / (d + 1)


def _overlaps(psi: np.ndarray) -> np.ndarray:
    """<psi|D[p,q]|psi> for the nontrivial displacements."""
    ops = _displacements(psi.size)[1:]
    return np.einsum("i,kij,j->k", psi.conj(), ops, psi)


def frame_potential(fiducial) -> float:
    psi = as_state(fiducial)
    _check_dim(psi.size)
    return float(np.sum(np.abs(_overlaps(psi)) ** 4))


def potential_excess(fiducial) -> float:
    """frame_potential(psi) - (d-1)/(d+1), evaluated without cancellation.

    Uses sum_k (|a_k|^2 - 1/(d+1))^2, which equals the excess because the
    nontrivial |a_k|^2 always sum to d - 1 for a unit vector.
    """
    psi = as_state(fiducial)
    d = _check_dim(psi.size)
    a2 = np.abs(_overlaps(psi)) ** 2
    return float(np.sum((a2 - 1.0 / (d + 1)) ** 2))


def potential_polynomial(x: np.ndarray) -> float:
    """Frame potential as a degree-4 polynomial in the real coordinates.

    ``x`` holds ``(Re psi, Im psi)``; no normalization is applied.
    """
    d = x.size // 2
    psi = x[:d] + 1j * x[d:]
    return float(np.sum(np.abs(_overlaps(psi)) ** 4))


def potential_gradient(x: np.ndarray) -> np.ndarray:
    """Analytic gradient of :func:`potential_polynomial` in real coordinates.

    With a_k = psi^H D_k psi, the Wirtinger derivative of |a_k|^4 w.r.t.
    conj(psi) is 2|a_k|^2 (conj(a_k) D_k psi + a_k D_k^H psi); the real
    gradient is twice its real and imaginary parts.
    """
    d = x.size // 2
    psi = x[:d] + 1j * x[d:]
    ops = _displacements(d)[1:]
    dpsi = ops @ psi
    dhpsi = np.conj(np.transpose(ops, (0, 2, 1))) @ psi
    a = dpsi @ psi.conj()
    w = 2.0 * np.abs(a) ** 2
    g = np.sum((w * a.conj())[:, None] * dpsi + (w * a)[:, None] * dhpsi, axis=0)
    return 2.0 * np.concatenate([g.real, g.imag])


def sic_from_fiducial(fiducial) -> SicPovm:
    psi = as_state(fiducial)
    d = _check_dim(psi.size)
    vecs = displacement_operators(d) @ psi
    projs = np.einsum("ka,kb->kab", vecs, vecs.conj())
    # overlaps measured as operator traces tr(Pi_i Pi_j)
    traces = np.einsum("iab,jba->ij", projs, projs).real
    target = (d * np.eye(d * d) + 1.0) / (d + 1)
    dev = float(np.max(np.abs(traces - target)))
    return SicPovm(dim=d, fiducial=psi.copy(), projectors=projs, max_overlap_deviation=dev)


def verify_sic(sic: SicPovm, tol: float = 1e-9) -> dict:
    """Check the SIC overlap condition on every pair of projectors."""
    projs = np.asarray(sic.projectors)
    d = sic.dim
    if projs.ndim != 3 or projs.shape != (d * d, d, d):
        raise ValueError(f"expected {d * d} projectors of size {d}x{d}, got shape {projs.shape}")
    traces = np.einsum("iab,jba->ij", projs, projs)
    target = (d * np.eye(d * d) + 1.0) / (d + 1)
    dev = float(np.max(np.abs(traces - target)))
    return {"max_deviation": dev, "pass": bool(dev < tol)}


def require_verified(sic: SicPovm, tol: float = UNVERIFIED_DEVIATION) -> None:
    if not sic.max_overlap_deviation < tol:
        raise ValueError(
            f"SIC is not verified (overlap deviation {sic.max_overlap_deviation:.3e} >= {tol:g})"
        )


def known_fiducial(d: int) -> np.ndarray:
    """Exact fiducials; currently only d = 2 (Bloch vector (1,1,1)/sqrt(3))."""
    if d != 2:
        raise DimensionError(f"no tabulated fiducial for d={d}; use search_fiducial")
    r = 1.0 / np.sqrt(3.0)
    return np.array(
        [np.sqrt((1 + r) / 2), np.exp(1j * np.pi / 4) * np.sqrt((1 - r) / 2)],
        dtype=complex,
    )


def _excess_of(x: np.ndarray, d: int) -> tuple[float, float]:
    """(potential excess, max overlap deviation) for a unit real-coordinate vector."""
    psi = x[:d] + 1j * x[d:]
    dev = np.abs(_overlaps(psi)) ** 2 - 1.0 / (d + 1)
    return float(np.sum(dev * dev)), float(np.max(np.abs(dev)))


def _descend(x: np.ndarray, d: int, tol: float, max_iter: int):
    """Projected gradient descent with Armijo backtracking on the unit sphere.

    The line search compares excesses rather than raw potentials: near a SIC
    the excess falls far below the rounding error of the potential itself.
    """
    step = DEFAULT_STEP
    f, dev = _excess_of(x, d)
    it = 0
    for it in range(1, max_iter + 1):
        if f < tol and dev < TARGET_DEVIATION:
            break
        g = potential_gradient(x)
        g = g - np.dot(g, x) * x  # tangent component
        gnorm2 = float(np.dot(g, g))
        if gnorm2 < GRAD_TOL**2:
            break
        t = step
        while True:
            y = x - t * g
            y /= np.linalg.norm(y)
            fy, dev_y = _excess_of(y, d)
            if fy <= f - 1e-4 * t * gnorm2:
                break
            t *= 0.5
            if t < 1e-20:
                return x, it
        x, f, dev = y, fy, dev_y
        # let the trial step grow again after a success
        step = min(4.0 * t, 10.0)
    return x, it


def _residuals(x: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Overlap residuals |a_k|^2 - 1/(d+1) and their Jacobian in real coordinates."""
    ops = _displacements(d)[1:]
    psi = x[:d] + 1j * x[d:]
    dpsi = ops @ psi
    dhpsi = np.conj(np.transpose(ops, (0, 2, 1))) @ psi
    a = dpsi @ psi.conj()
    r = np.abs(a) ** 2 - 1.0 / (d + 1)
    g = a.conj()[:, None] * dpsi + a[:, None] * dhpsi
    return r, 2.0 * np.concatenate([g.real, g.imag], axis=1)


def _polish(x: np.ndarray, d: int, max_iter: int = POLISH_ITERATIONS) -> np.ndarray:
    """Gauss-Newton on the overlap residuals, restricted to the sphere's tangent space.

    Finishes runs that gradient descent leaves on a degenerate minimum (d = 3
    fiducials form a continuous family and descent creeps there) and drives
    the residuals down until the line search can no longer reduce them.
    """
    r, jac = _residuals(x, d)
    f = float(r @ r)
    for _ in range(max_iter):
        if np.max(np.abs(r)) < POLISH_DEVIATION:
            break
        tangent = np.eye(2 * d) - np.outer(x, x)
        step = np.linalg.lstsq(jac @ tangent, -r, rcond=None)[0]
        t = 1.0
        while t > 1e-12:
            y = x + t * step
            y /= np.linalg.norm(y)
            ry, jy = _residuals(y, d)
            fy = float(ry @ ry)
            if fy < f * (1.0 - 1e-4 * t):
                break
            t *= 0.5
        else:
            break
        x, r, jac, f = y, ry, jy, fy
    return x


def _restart_seed(seed: int, k: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, k])


def search_fiducial(
    d: int,
    seed: int,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_ITERATIONS,
) -> tuple[np.ndarray, SearchReport]:
    """Search for a Weyl-Heisenberg SIC fiducial by frame-potential descent.

    Restart ``k`` starts from a Haar-random vector drawn from the seed
    sequence ``(seed, k)``. The first restart whose orbit satisfies the
    overlap condition to 1e-9 (and whose potential excess is below ``tol``)
    is returned. Raises :class:`SearchFailure` if none does.
    """
    d = _check_dim(d, SEARCH_MAX_DIM)
    if restarts < 1:
        report = SearchReport(d, seed, 0, float("nan"), float("inf"), False)
        raise SearchFailure("restarts must be >= 1; no search performed", report)
    best = None
    iters = []
    for k in range(restarts):
        rng = np.random.Generator(np.random.PCG64(_restart_seed(seed, k)))
        z = complex_gaussian(rng, d)
        x = np.concatenate([z.real, z.imag])
        x /= np.linalg.norm(x)
        x, n_it = _descend(x, d, tol, max_iter)
        x = _polish(x, d)
        iters.append(n_it)
        psi = x[:d] + 1j * x[d:]
        psi /= np.linalg.norm(psi)
        excess = potential_excess(psi)
        dev = sic_from_fiducial(psi).max_overlap_deviation
        if best is None or dev < best[1]:
            best = (psi, dev, excess)
        if dev < 1e-9 and excess < tol:
            report = SearchReport(
                d, seed, k + 1, frame_potential(psi), dev, True, iterations=iters
            )
            return psi, report
    psi, dev, excess = best
    report = SearchReport(d, seed, restarts, frame_potential(psi), dev, False, iterations=iters)
    raise SearchFailure(
        f"no SIC fiducial found for d={d} after {restarts} restarts "
        f"(best deviation {dev:.3e}); raise tol, add restarts, or use known_fiducial",
        report,
    )


__all__ = [
    "SicPovm",
    "SearchReport",
    "SearchFailure",
    "displacement_operator",
    "displacement_operators",
    "frame_potential",
    "potential_excess",
    "potential_minimum",
    "potential_polynomial",
    "potential_gradient",
    "search_fiducial",
    "known_fiducial",
    "sic_from_fiducial",
    "verify_sic",
    "require_verified",
    "sic_for_dimension",
    "TOL_NORM",
]


def sic_for_dimension(d: int, seed: int | None = None, restarts: int = DEFAULT_RESTARTS) -> SicPovm:
    """The tabulated SIC for d = 2, otherwise one found by a seeded search."""
    if d == 2:
        return sic_from_fiducial(known_fiducial(2))
    if seed is None:
        raise ValueError(f"d={d} needs a numerical search; supply a seed")
    psi, _ = search_fiducial(d, seed, restarts=restarts)
    return sic_from_fiducial(psi)
