"""Operator algebra on the space of d x d complex matrices.

Operators are plain complex ndarrays.  This module equips them with the
Hilbert-Schmidt inner product Tr[A^dag B], the induced norm, a Hermitian
eigen-solver with a reproducible phase convention, the Hermitian matrix
exponential, and the frame super-operator used to test operator frames.

All functions are pure and never mutate their inputs, so values can be
shared freely across workers.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

# Hermiticity is accepted when max|H - H^dag| <= atol + rtol * max|H|.
HERMITIAN_ATOL = 1e-10
HERMITIAN_RTOL = 1e-12


class DimensionMismatchError(ValueError):
    """Operands live in operator spaces of different dimension."""


class NotHermitianError(ValueError):
    """A Hermitian matrix was required."""


def as_operator(entries, hermitian_hint: bool | None = None) -> np.ndarray:
    """Coerce ``entries`` to a square complex matrix and validate it.

    Parameters
    ----------
    entries : array_like
        Square matrix data, any shape coercible to (d, d) complex.
    hermitian_hint : bool, optional
        When True, the matrix must be Hermitian to within
        ``1e-12 * (1 + max|entries|)``.

    Returns
    -------
    ndarray
        A fresh (d, d) complex128 array.
    """
    a = np.array(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"operator must be a nonempty square matrix, got shape {a.shape}")
    if hermitian_hint:
        scale = 1.0 + float(np.abs(a).max())
        defect = float(np.abs(a - a.conj().T).max())
        if defect > 1e-12 * scale:
            raise NotHermitianError(
                f"hermitian_hint set but max|A - A^dag| = {defect:.3e} exceeds {1e-12 * scale:.3e}"
            )
    return a


def require_same_dim(a: np.ndarray, b: np.ndarray) -> int:
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"incompatible operator spaces: shapes {a.shape} and {b.shape}"
        )
    return a.shape[0]


def is_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    defect = float(np.abs(a - a.conj().T).max())
    return defect <= atol + HERMITIAN_RTOL * float(np.abs(a).max())


def require_hermitian(a: np.ndarray, what: str = "operator") -> np.ndarray:
    if not is_hermitian(a):
        defect = float(np.abs(a - a.conj().T).max())
        raise NotHermitianError(f"{what} is not Hermitian: max|A - A^dag| = {defect:.3e}")
    return a


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt scalar product Tr[a^dag b].

    Conjugate-symmetric: ``hs_inner(a, b) == conj(hs_inner(b, a))``.
    """
    require_same_dim(a, b)
    # vdot flattens row-major and conjugates the first argument,
    # which is exactly sum_ij conj(a_ij) b_ij = Tr[a^dag b].
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt norm sqrt(Tr[a^dag a]); zero iff a == 0."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def hermitian_parts(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a = h + i*k into Hermitian h and Hermitian k."""
    a = np.asarray(a, dtype=complex)
    h = (a + a.conj().T) / 2
    k = (a - a.conj().T) / 2j
    return h, k


def eig_hermitian(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix with a canonical phase convention.

    Returns
    -------
    eigenvalues : ndarray
        Real, ascending.
    eigenvectors : ndarray
        Orthonormal columns, column k belonging to eigenvalue k.  Each
        column is rotated so its largest-magnitude component is real and
        positive, making the decomposition reproducible across runs.
    """
    h = np.asarray(h, dtype=complex)
    require_hermitian(h)
    w, v = np.linalg.eigh(h)
    for k in range(v.shape[1]):
        col = v[:, k]
        j = int(np.argmax(np.abs(col)))
        pivot = col[j]
        if pivot != 0:
            v[:, k] = col * (np.conj(pivot) / abs(pivot))
    return w, v


def op_exp(h: np.ndarray, phase: float) -> np.ndarray:
    """exp(i * phase * h) for Hermitian h, via eigendecomposition.

    Diagonalizing keeps the result unitary to roundoff, which a truncated
    series would not.
    """
    w, v = eig_hermitian(h)
    return (v * np.exp(1j * phase * w)) @ v.conj().T


def superop_from_frame(
    quorum: Sequence[np.ndarray], dual: Sequence[np.ndarray]
) -> np.ndarray:
    """Frame super-operator sum_n |C_n>(B_n| as a d^2 x d^2 matrix.

    Entry at row (i, j), column (l, k) is sum_n C_n[i, j] * conj(B_n[l, k]),
    rows and columns flattened row-major.  The result equals the d^2
    identity exactly when (quorum, dual) is a spanning-set / dual pair.
    """
    if len(quorum) != len(dual):
        raise DimensionMismatchError(
            f"quorum has {len(quorum)} elements but dual has {len(dual)}"
        )
    if not quorum:
        raise ValueError("empty frame")
    d = quorum[0].shape[0]
    for c, b in zip(quorum, dual):
        if c.shape != (d, d) or b.shape != (d, d):
            raise DimensionMismatchError("frame elements have mixed dimensions")
    vc = np.stack([np.asarray(c, dtype=complex).reshape(-1) for c in quorum], axis=1)
    vb = np.stack([np.asarray(b, dtype=complex).reshape(-1) for b in dual], axis=1)
    return vc @ vb.conj().T


def random_operator(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Generic complex matrix with i.i.d. standard complex normal entries."""
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = random_operator(dim, rng)
    return (a + a.conj().T) / 2


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random density matrix (positive semidefinite, unit trace)."""
    m = random_operator(dim, rng)
    rho = m @ m.conj().T
    return rho / np.trace(rho).real
