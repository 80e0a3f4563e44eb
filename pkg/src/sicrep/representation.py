"""Quantum states as probability vectors over a SIC.

A density matrix ``rho`` maps to ``p(i) = tr(rho Pi_i) / d`` and back via
``rho = sum_i ((d+1) p(i) - 1/d) Pi_i``. A ground measurement ``{F_j}`` is
encoded by the conditional matrix ``r[j, i] = tr(Pi_i F_j)`` (rows are ground
outcomes, columns sky outcomes), and its Born probabilities follow from the
affine modification of the law of total probability

    q(j) = sum_i (alpha p(i) - beta) r(j|i),   alpha = d+1, beta = 1/d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import (
    TOL_HERM,
    TOL_PSD,
    DimensionError,
    as_matrix,
    check_povm,
    eigenvalues_hermitian,
)
from .whsic import SicPovm, require_verified

TOL_PROB = 1e-12
CLAMP_TOL = 1e-14
TRIPLE_DEFAULT_MAX_DIM = 6


class ProbabilityError(ValueError):
    """A vector or matrix violates the probability axioms beyond float noise."""


class UrungleichungViolation(ProbabilityError):
    """Urgleichung output left [0, 1]: the (p, r) pair is not jointly admissible."""

    def __init__(self, message: str, q: np.ndarray):
        super().__init__(message)
        self.q = q


def as_prob_vector(p, tol: float = TOL_PROB) -> np.ndarray:
    """Validate a probability vector.

    Entries in [-1e-14, 0) are treated as rounding noise: clamped to zero and
    the vector renormalized. Anything more negative is an error.
    """
    v = np.array(p, dtype=float).reshape(-1)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ProbabilityError("probability vector is empty or non-finite")
    if np.any(v < -CLAMP_TOL):
        raise ProbabilityError(f"negative probability {v.min():.3e}")
    if abs(v.sum() - 1.0) > tol:
        raise ProbabilityError(f"probabilities sum to {v.sum()!r}, not 1")
    if np.any(v < 0):
        v[v < 0] = 0.0
        v /= v.sum()
    return v


@dataclass
class ConditionalMatrix:
    """Stochastic matrix of conditionals; ``entries[j, i] = r(j|i)``."""

    entries: np.ndarray

    def __post_init__(self):
        r = np.array(self.entries, dtype=float)
        if r.ndim != 2 or 0 in r.shape:
            raise DimensionError(f"conditional matrix must be 2-D, got shape {r.shape}")
        if not np.all(np.isfinite(r)):
            raise ProbabilityError("conditional matrix has non-finite entries")
        if np.any(r < -CLAMP_TOL) or np.any(r > 1 + CLAMP_TOL):
            raise ProbabilityError("conditional probabilities must lie in [0, 1]")
        cols = r.sum(axis=0)
        if np.max(np.abs(cols - 1.0)) > TOL_PROB:
            raise ProbabilityError(
                f"conditional matrix is not stochastic (max |sum_j r(j|i) - 1| = "
                f"{np.max(np.abs(cols - 1.0)):.3e})"
            )
        self.entries = np.clip(r, 0.0, 1.0)

    @property
    def ground_outcomes(self) -> int:
        return self.entries.shape[0]

    @property
    def sky_outcomes(self) -> int:
        return self.entries.shape[1]


def _as_conditional(r) -> ConditionalMatrix:
    return r if isinstance(r, ConditionalMatrix) else ConditionalMatrix(r)


def _check_sic_dim(sic: SicPovm, d: int) -> None:
    if sic.dim != d:
        raise DimensionError(f"dimension mismatch: state d={d}, SIC d={sic.dim}")


def state_to_probs(rho, sic: SicPovm) -> np.ndarray:
    """Born probabilities p(i) = tr(rho Pi_i) / d of the SIC outcomes."""
    rho = as_matrix(rho)
    _check_sic_dim(sic, rho.shape[0])
    require_verified(sic)
    d = sic.dim
    p = np.einsum("ab,iba->i", rho, sic.projectors).real / d
    return as_prob_vector(p)


def probs_to_state(p, sic: SicPovm) -> np.ndarray:
    """Hermitian, trace-one operator sum_i ((d+1) p(i) - 1/d) Pi_i.

    Not necessarily positive: only the quantum subset of the simplex maps to
    density matrices.
    """
    d = sic.dim
    v = np.asarray(p, dtype=float).reshape(-1)
    if v.size != d * d:
        raise DimensionError(f"expected {d * d} probabilities, got {v.size}")
    coeffs = (d + 1) * v - 1.0 / d
    rho = np.einsum("i,iab->ab", coeffs, sic.projectors)
    return 0.5 * (rho + rho.conj().T)


def min_eigenvalue(p, sic: SicPovm) -> float:
    return float(eigenvalues_hermitian(probs_to_state(p, sic))[0])


def is_valid_quantum_prob(p, sic: SicPovm, tol: float = TOL_PSD) -> bool:
    """Membership of ``p`` in quantum-state space (PSD reconstruction)."""
    return min_eigenvalue(p, sic) >= -tol


def conditional_matrix(ground, sic: SicPovm) -> ConditionalMatrix:
    """r(j|i) = tr(Pi_i F_j) for a ground POVM ``{F_j}``."""
    elems = check_povm(ground)
    if elems[0].shape[0] != sic.dim:
        raise DimensionError(f"POVM dimension {elems[0].shape[0]} != SIC dimension {sic.dim}")
    f = np.array(elems)
    r = np.einsum("iab,jba->ji", sic.projectors, f)
    if np.max(np.abs(r.imag)) > TOL_HERM:
        raise ValueError("conditional probabilities have a non-negligible imaginary part")
    r = r.real
    r[(r < 0) & (r >= -CLAMP_TOL)] = 0.0
    return ConditionalMatrix(r)


def affine_replacement(p, alpha: float, beta: float) -> np.ndarray:
    """The transformed sky vector alpha p(i) - beta."""
    alpha, beta = float(alpha), float(beta)
    return alpha * np.asarray(p, dtype=float) - beta


def total_probability(p, r, *, check: bool = True) -> np.ndarray:
    """s(j) = sum_i p(i) r(j|i).

    With ``check=False`` any real weight vector is accepted and pushed
    through ``r`` unchanged; the Urgleichung is that push-forward applied to
    the affinely transformed prior.
    """
    r = _as_conditional(r)
    v = as_prob_vector(p) if check else np.asarray(p, dtype=float).reshape(-1)
    if v.size != r.sky_outcomes:
        raise DimensionError(f"prior has {v.size} entries, r has {r.sky_outcomes} sky outcomes")
    return r.entries @ v


def _check_normalization(n: int, alpha: float, beta: float) -> None:
    alpha, beta = float(alpha), float(beta)
    if abs(alpha - (n * beta + 1)) > 1e-12:
        raise ValueError(f"alpha = n beta + 1 violated: alpha={alpha}, n={n}, beta={beta}")


def urgleichung_raw(p, r, alpha: float, beta: float) -> np.ndarray:
    """q(j) = sum_i (alpha p(i) - beta) r(j|i) with no range check."""
    r = _as_conditional(r)
    v = np.asarray(p, dtype=float).reshape(-1)
    if v.size != r.sky_outcomes:
        raise DimensionError(f"prior has {v.size} entries, r has {r.sky_outcomes} sky outcomes")
    _check_normalization(r.sky_outcomes, alpha, beta)
    return total_probability(affine_replacement(v, alpha, beta), r, check=False)


def urgleichung(p, r, alpha: float, beta: float, tol: float = TOL_PROB) -> np.ndarray:
    """Ground probabilities from a sky prior under the generalized Urgleichung.

    Raises :class:`UrungleichungViolation` if any q(j) falls outside
    [-tol, 1+tol], which signals a non-quantum prior or conditional.
    """
    q = urgleichung_raw(p, r, alpha, beta)
    if np.any(q < -tol) or np.any(q > 1 + tol):
        raise UrungleichungViolation(
            f"Urungleichung violated: q ranges over [{q.min():.6g}, {q.max():.6g}]", q
        )
    return np.clip(q, 0.0, 1.0)


def urungleichung_check(p, r, alpha: float, beta: float, tol: float = TOL_PROB) -> bool:
    q = urgleichung_raw(p, r, alpha, beta)
    return bool(np.all(q >= -tol) and np.all(q <= 1 + tol))


@dataclass
class TripleProducts:
    dim: int
    tensor: np.ndarray  # c[i, j, k] = Re tr(Pi_i Pi_j Pi_k)


def triple_products(sic: SicPovm, allow_large: bool = False) -> TripleProducts:
    require_verified(sic)
    d = sic.dim
    if d > TRIPLE_DEFAULT_MAX_DIM and not allow_large:
        raise ValueError(
            f"triple-product tensor for d={d} has {d**6} entries; pass allow_large=True"
        )
    c = np.einsum("iab,jbc,kca->ijk", sic.projectors, sic.projectors, sic.projectors).real
    return TripleProducts(dim=d, tensor=c)


def purity_residuals(p, c: TripleProducts, d: int) -> tuple[float, float]:
    """Residuals of the two pure-state identities.

    Returns ``(sum p^2 - 2/(d(d+1)), sum c_ijk p_i p_j p_k - (d+7)/(d+1)^3)``.
    Both vanish on pure states; the first is negative on mixed states.
    """
    v = np.asarray(p, dtype=float).reshape(-1)
    if v.size != d * d or c.dim != d:
        raise DimensionError(f"shape mismatch: {v.size} probabilities, tensor d={c.dim}, d={d}")
    res2 = float(v @ v) - 2.0 / (d * (d + 1))
    cubic = float(np.einsum("ijk,i,j,k->", c.tensor, v, v, v))
    res3 = cubic - (d + 7) / (d + 1) ** 3
    return res2, res3


def basis_states(n: int, alpha: float, beta: float) -> list[np.ndarray]:
    """Basis distributions e_k(i) = (delta_ki + beta) / alpha."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_normalization(n, alpha, beta)
    alpha, beta = float(alpha), float(beta)
    eye = np.eye(n)
    return [as_prob_vector((eye[k] + beta) / alpha) for k in range(n)]


def basis_state_norm2(n: int, alpha: float, beta: float) -> float:
    """Squared norm (1 + 2 beta + n beta^2) / alpha^2 shared by all basis states."""
    return (1 + 2 * beta + n * beta**2) / alpha**2
