"""Small dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Dimensions are
desk scale (d <= 16), so clarity wins over speed: eigenvalues come from a
cyclic complex Jacobi sweep rather than LAPACK.
"""

from __future__ import annotations

import numpy as np

TOL_HERM = 1e-12
TOL_TRACE = 1e-12
TOL_NORM = 1e-12
TOL_ORTH = 1e-12
TOL_SUM = 1e-12
TOL_PSD = 1e-10
TOL_EIG = 1e-12

MAX_DIM = 16
JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
GS_SKIP_TOL = 1e-8


class DimensionError(ValueError):
    """Operands have incompatible or unsupported dimensions."""


class NotHermitianError(ValueError):
    """A matrix expected to be Hermitian is not, within tolerance."""


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_state(v, tol: float = TOL_NORM) -> np.ndarray:
    """Coerce ``v`` to a unit-norm complex vector."""
    psi = np.asarray(v, dtype=complex).reshape(-1)
    if psi.size == 0 or not np.all(np.isfinite(psi)):
        raise ValueError("state vector is empty or non-finite")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state vector is not unit norm (|v| = {norm!r})")
    return psi


def hermiticity_error(a) -> float:
    m = as_matrix(a)
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(a, tol: float = TOL_HERM) -> np.ndarray:
    m = as_matrix(a)
    err = float(np.max(np.abs(m - m.conj().T)))
    if err > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max |A - A^H| = {err:.3e})")
    return m


def trace_inner(a, b) -> complex:
    """Return tr(a b)."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # tr(AB) = sum_ij A_ij B_ji
    return complex(np.sum(a * b.T))


def projector(psi) -> np.ndarray:
    """Rank-1 projector |psi><psi| for a unit vector."""
    psi = as_state(psi)
    return np.outer(psi, psi.conj())


def _jacobi(a: np.ndarray, want_vectors: bool):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex) if want_vectors else None
    scale = max(1.0, float(np.linalg.norm(a)))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a[offdiag]) ** 2))
        if off < JACOBI_OFF_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mag = abs(b)
                if mag == 0.0:
                    continue
                phase = b / mag
                app = a[p, p].real
                aqq = a[q, q].real
                diff = aqq - app
                if mag < 1e-36 * abs(diff):
                    t = mag / diff
                else:
                    theta = diff / (2.0 * mag)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # phase rotation making a[p, q] real, then a real Givens rotation
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if v is not None:
                    v[:, idx] = v[:, idx] @ g
    else:
        raise RuntimeError("Jacobi eigensolver did not converge")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], (v[:, order] if v is not None else None)


def eigenvalues_hermitian(a, tol: float = TOL_HERM) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (cyclic Jacobi)."""
    m = check_hermitian(a, tol)
    m = 0.5 * (m + m.conj().T)
    w, _ = _jacobi(m, want_vectors=False)
    return w


def eigh_hermitian(a, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and matching orthonormal eigenvectors (as columns)."""
    m = check_hermitian(a, tol)
    m = 0.5 * (m + m.conj().T)
    return _jacobi(m, want_vectors=True)


def is_psd(a, tol: float = TOL_PSD) -> bool:
    return bool(eigenvalues_hermitian(a)[0] >= -tol)


def inverse_sqrt_psd(a) -> np.ndarray:
    """A^{-1/2} for a positive definite Hermitian matrix."""
    w, v = eigh_hermitian(a)
    if w[0] <= 0:
        raise ValueError("matrix is not positive definite")
    return (v / np.sqrt(w)) @ v.conj().T


def is_density_matrix(rho, tol: float = TOL_PSD) -> bool:
    m = as_matrix(rho)
    if hermiticity_error(m) > TOL_HERM:
        return False
    if abs(np.trace(m) - 1.0) > TOL_TRACE:
        return False
    return is_psd(m, tol)


def check_povm(elements, tol: float = TOL_PSD) -> list[np.ndarray]:
    """Validate a POVM: Hermitian PSD elements that sum to the identity."""
    elems = [as_matrix(f) for f in elements]
    if not elems:
        raise ValueError("POVM has no elements")
    d = elems[0].shape[0]
    if any(f.shape != (d, d) for f in elems):
        raise DimensionError("POVM elements have mixed dimensions")
    for k, f in enumerate(elems):
        if hermiticity_error(f) > TOL_HERM:
            raise NotHermitianError(f"POVM element {k} is not Hermitian")
        if not is_psd(f, tol):
            raise ValueError(f"POVM element {k} is not positive semidefinite")
    total = np.sum(elems, axis=0)
    err = float(np.max(np.abs(total - np.eye(d))))
    if err > max(TOL_SUM, 10 * d * np.finfo(float).eps * len(elems)):
        raise ValueError(f"POVM elements do not sum to the identity (max error {err:.3e})")
    return elems


# -- randomness -------------------------------------------------------------
#
# Generator: numpy PCG64 seeded with the integer seed. Gaussians are produced
# from its uniform doubles by the Box-Muller transform so that corpora can be
# regenerated from (seed, call sequence) alone.


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def box_muller(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` standard normal samples via Box-Muller on PCG64 uniforms."""
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    return z[:size]


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    shape = tuple(np.atleast_1d(shape))
    size = int(np.prod(shape))
    z = box_muller(rng, 2 * size)
    return (z[:size] + 1j * z[size:]).reshape(shape)


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise DimensionError(f"dimension must be an integer >= 2, got {d!r}")
    if d > MAX_DIM:
        raise DimensionError(f"dimension {d} exceeds supported maximum {MAX_DIM}")
    return int(d)


def random_ginibre_density(d: int, seed: int) -> np.ndarray:
    """Hilbert-Schmidt random density matrix G G^H / tr(G G^H)."""
    d = _check_dim(d)
    g = complex_gaussian(make_rng(seed), (d, d))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def haar_random_pure(d: int, seed: int) -> np.ndarray:
    d = _check_dim(d)
    psi = complex_gaussian(make_rng(seed), d)
    return psi / np.linalg.norm(psi)


def random_povm(d: int, m: int, seed: int) -> list[np.ndarray]:
    """Random full-rank POVM with ``m`` outcomes.

    Elements are S^{-1/2} A_j S^{-1/2} with A_j = G_j G_j^H Ginibre and
    S = sum_j A_j.
    """
    d = _check_dim(d)
    if m < 1:
        raise ValueError("a POVM needs at least one outcome")
    g = complex_gaussian(make_rng(seed), (m, d, d))
    a = g @ np.conj(np.transpose(g, (0, 2, 1)))
    s = np.sum(a, axis=0)
    t = inverse_sqrt_psd(0.5 * (s + s.conj().T))
    elems = []
    for aj in a:
        f = t @ aj @ t
        elems.append(0.5 * (f + f.conj().T))
    return elems


def onb_containing(v) -> list[np.ndarray]:
    """Orthonormal basis whose first element is ``v``.

    Completion vectors come from the standard basis by Gram-Schmidt with one
    reorthogonalization pass; candidates whose residual is below 1e-8 are
    skipped.
    """
    psi = np.asarray(v, dtype=complex).reshape(-1)
    norm = np.linalg.norm(psi)
    if psi.size == 0 or not np.isfinite(norm) or norm < GS_SKIP_TOL:
        raise ValueError("cannot complete a basis from a (near-)zero vector")
    psi = as_state(psi)
    d = psi.size
    basis = [psi]
    for k in range(d):
        if len(basis) == d:
            break
        w = np.zeros(d, dtype=complex)
        w[k] = 1.0
        for _ in range(2):
            for b in basis:
                w = w - np.vdot(b, w) * b
        r = np.linalg.norm(w)
        if r < GS_SKIP_TOL:
            continue
        basis.append(w / r)
    if len(basis) != d:
        raise RuntimeError("basis completion failed")
    return basis
