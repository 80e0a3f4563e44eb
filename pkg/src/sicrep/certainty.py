"""Measurements that achieve the ideal of certainty.

The ground measurement is an orthonormal basis whose first vector is the
eigenvector of one SIC projector (so m0 = d). Its reciprocity priors
``p_k(i) = (m/n) r(k|i)`` are then the SIC vectors of the basis states, one of
them a basis distribution, and any two of them sit at the universal angle
``cos(theta) = 1/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import DimensionError, eigh_hermitian, onb_containing
from .representation import (
    ConditionalMatrix,
    as_prob_vector,
    basis_states,
    conditional_matrix,
    is_valid_quantum_prob,
    urgleichung_raw,
)
from .whsic import SicPovm, require_verified

TOL_CERTAINTY = 1e-10
COLUMN_NORM_FLOOR = 1e-6


class CertaintyError(RuntimeError):
    """A constructed experiment fails one of its defining properties."""


@dataclass
class CertaintyExperiment:
    dim: int
    sic: SicPovm
    align_index: int
    ground_basis: list[np.ndarray]
    conditional: ConditionalMatrix
    priors: list[np.ndarray]
    gram: np.ndarray

    @property
    def alpha(self) -> float:
        return self.dim + 1.0

    @property
    def beta(self) -> float:
        return 1.0 / self.dim

    @property
    def n(self) -> int:
        return self.dim * self.dim

    @property
    def m0(self) -> int:
        return len(self.ground_basis)


def isu_check(r, tol: float = TOL_CERTAINTY) -> dict:
    """In-step unpredictability: every row sum sum_i r(j|i) equals n/m."""
    entries = r.entries if isinstance(r, ConditionalMatrix) else np.asarray(r, dtype=float)
    m, n = entries.shape
    dev = float(np.max(np.abs(entries.sum(axis=1) - n / m)))
    return {"max_deviation": dev, "pass": bool(dev < tol)}


def _projector_eigenvector(proj: np.ndarray) -> np.ndarray:
    # Pi = |v><v| so every nonzero column is v times a phase
    norms = np.linalg.norm(proj, axis=0)
    k = int(np.argmax(norms))
    if norms[k] > COLUMN_NORM_FLOOR:
        v = proj[:, k] / norms[k]
        if np.linalg.norm(proj @ v - v) < 1e-10:
            return v
    w, vecs = eigh_hermitian(proj)
    return vecs[:, -1]


def reciprocity_priors(r: ConditionalMatrix) -> list[np.ndarray]:
    """Priors p_k(i) = (m/n) r(k|i) of an ISU ground measurement."""
    m, n = r.entries.shape
    return [as_prob_vector((m / n) * r.entries[k]) for k in range(m)]


def build_certainty_experiment(sic: SicPovm, align_index: int = 1) -> CertaintyExperiment:
    """ONB ground measurement aligned with SIC projector ``align_index`` (1-based).

    Raises :class:`CertaintyError` if the result is not ISU, a prior is not a
    quantum state, certainty is not achieved, or the aligned prior is not the
    corresponding basis distribution.
    """
    require_verified(sic)
    d = sic.dim
    n = d * d
    if not 1 <= align_index <= n:
        raise DimensionError(f"align_index must be in 1..{n}, got {align_index}")
    v = _projector_eigenvector(sic.projectors[align_index - 1])
    basis = onb_containing(v)
    ground = [np.outer(b, b.conj()) for b in basis]
    r = conditional_matrix(ground, sic)

    isu = isu_check(r)
    if not isu["pass"]:
        raise CertaintyError(f"ground basis is not ISU (deviation {isu['max_deviation']:.3e})")
    priors = reciprocity_priors(r)
    alpha, beta = d + 1.0, 1.0 / d
    eye = np.eye(d)
    for k, pk in enumerate(priors):
        if not is_valid_quantum_prob(pk, sic):
            raise CertaintyError(f"prior {k + 1} is not a quantum state")
        q = urgleichung_raw(pk, r, alpha, beta)
        if np.max(np.abs(q - eye[k])) >= TOL_CERTAINTY:
            raise CertaintyError(f"prior {k + 1} does not achieve certainty")
    e = basis_states(n, alpha, beta)[align_index - 1]
    if np.max(np.abs(priors[0] - e)) >= TOL_CERTAINTY:
        raise CertaintyError("aligned prior is not a basis distribution")

    gram = np.array(priors) @ np.array(priors).T
    return CertaintyExperiment(
        dim=d,
        sic=sic,
        align_index=align_index,
        ground_basis=basis,
        conditional=r,
        priors=priors,
        gram=gram,
    )


def gram_matrix(exp: CertaintyExperiment) -> np.ndarray:
    """Inner products <<p_j|p_k>> of the reciprocity priors."""
    p = np.array(exp.priors)
    return p @ p.T


def predicted_gram(m0: int, n: int, alpha: float, beta: float) -> np.ndarray:
    """(1/alpha) ((m0/n) delta_jk + beta)."""
    return ((m0 / n) * np.eye(m0) + beta) / alpha


def certainty_residual(exp: CertaintyExperiment) -> float:
    """max_{j,k} |q_k(j) - delta_jk| over all priors."""
    eye = np.eye(exp.m0)
    worst = 0.0
    for k, pk in enumerate(exp.priors):
        q = urgleichung_raw(pk, exp.conditional, exp.alpha, exp.beta)
        worst = max(worst, float(np.max(np.abs(q - eye[k]))))
    return worst


def universal_angle(exp: CertaintyExperiment) -> float:
    """cos(theta) = <<p_1|p_2>> / <<p_1|p_1>>."""
    if exp.m0 < 2:
        raise DimensionError("the angle needs at least two priors")
    g = gram_matrix(exp)
    if g[0, 0] <= 0:
        raise ValueError("degenerate Gram matrix")
    return float(g[0, 1] / g[0, 0])


def angle_closed_form(n: int, m0: int) -> float:
    return (n - m0) / ((m0 - 1) ** 2 + n - 1)
