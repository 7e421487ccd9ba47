"""Operator frames: completeness tests and dual-frame construction.

A quorum is an ordered family of operators spanning (a subspace of) the
space of d x d matrices.  Its dual frame B_n satisfies Tr[B_n^dag C_m] =
delta_nm for linearly independent quorums and, for complete quorums, the
resolution of identity sum_n |C_n>(B_n| = 1 on operator space.  Two dual
constructions are provided: a Gram-Schmidt sweep that tolerates linearly
dependent elements by dropping them, and direct Gram-matrix inversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .liouville import (
    DimensionMismatchError,
    as_operator,
    hs_norm,
    random_operator,
    superop_from_frame,
)

# Singular values below RANK_RTOL * sigma_max count as zero in rank tests.
RANK_RTOL = 1e-10
# Gram-Schmidt residuals below DROP_RTOL * max input norm mark a linearly
# dependent element, which is dropped (zero dual, kept_mask False).
DROP_RTOL = 1e-10
# Gram matrices with condition number at or above this are refused.
GRAM_CONDITION_CAP = 1e12
# Pass/fail threshold for the spanning-definition residuals.
DEFINITION_TOL = 1e-9


class IncompleteQuorumError(ValueError):
    """Dual construction requires a complete quorum (or the subspace flag)."""

    def __init__(self, report: "SpanningReport"):
        super().__init__(
            f"quorum is incomplete (rank {report.rank} < required {report.rank_required}); "
            "pass allow_subspace=True for a dual on the spanned subspace"
        )
        self.report = report


class SingularGramError(ValueError):
    """Gram matrix too ill-conditioned for a stable inversion."""

    def __init__(self, condition: float, detail: str | None = None):
        message = (
            f"Gram matrix condition number {condition:.3e} exceeds the stability cap; "
            "the quorum elements are linearly dependent or nearly so "
            "(the Gram-Schmidt route handles dependent sets by elimination)"
        )
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.condition = condition


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Quorum:
    """Ordered family of same-dimension operators with setting labels."""

    dim: int
    elements: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.elements) < 1:
            raise ValueError("a quorum needs at least one element")
        if len(self.labels) != len(self.elements):
            raise ValueError("labels and elements must have equal length")
        for c in self.elements:
            if c.shape != (self.dim, self.dim):
                raise DimensionMismatchError(
                    f"element of shape {c.shape} in a dim-{self.dim} quorum"
                )

    @classmethod
    def from_elements(cls, elements: Sequence, labels: Sequence[str] | None = None) -> "Quorum":
        ops = tuple(_frozen(as_operator(c)) for c in elements)
        if not ops:
            raise ValueError("a quorum needs at least one element")
        if labels is None:
            labels = tuple(f"C_{n}" for n in range(len(ops)))
        return cls(dim=ops[0].shape[0], elements=ops, labels=tuple(str(s) for s in labels))

    def __len__(self) -> int:
        return len(self.elements)

    def coefficient_matrix(self) -> np.ndarray:
        """N x d^2 matrix whose rows are the row-major flattened elements."""
        return np.stack([c.reshape(-1) for c in self.elements])


@dataclass(frozen=True)
class DualFrame:
    """Dual operators aligned index-by-index with a quorum.

    Dropped (linearly dependent) quorum elements keep their slot with a
    zero dual operator and kept_mask False, so measurement settings stay
    aligned with their duals.
    """

    dim: int
    elements: tuple[np.ndarray, ...]
    kept_mask: tuple[bool, ...]

    def __post_init__(self):
        if len(self.kept_mask) != len(self.elements):
            raise ValueError("kept_mask and elements must have equal length")
        for b in self.elements:
            if b.shape != (self.dim, self.dim):
                raise DimensionMismatchError(
                    f"element of shape {b.shape} in a dim-{self.dim} dual frame"
                )

    @classmethod
    def from_elements(cls, elements: Sequence, kept_mask: Sequence[bool] | None = None) -> "DualFrame":
        ops = tuple(_frozen(as_operator(b)) for b in elements)
        if not ops:
            raise ValueError("a dual frame needs at least one element")
        if kept_mask is None:
            kept_mask = (True,) * len(ops)
        return cls(dim=ops[0].shape[0], elements=ops, kept_mask=tuple(bool(k) for k in kept_mask))

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class DefinitionCheck:
    passed: bool
    residual: float


@dataclass
class SpanningReport:
    """Outcome of completeness / spanning-set verification.

    ``defect_witness`` is a unit-norm operator orthogonal to every quorum
    element; it is present exactly when the quorum is incomplete.
    ``checks`` maps definition names ("i".."iv") to their residuals.
    """

    complete: bool
    rank: int
    rank_required: int
    defect_witness: np.ndarray | None = None
    checks: dict[str, DefinitionCheck] = field(default_factory=dict)
    definitions_agree: bool = True


def _canonical_phase(a: np.ndarray) -> np.ndarray:
    flat = a.reshape(-1)
    j = int(np.argmax(np.abs(flat)))
    pivot = flat[j]
    if pivot != 0:
        a = a * (np.conj(pivot) / abs(pivot))
    return a


def completeness_check(q: Quorum) -> SpanningReport:
    """Rank test of the quorum via singular values.

    The quorum is complete iff its N x d^2 coefficient matrix has rank
    d^2 (singular values below ``RANK_RTOL * sigma_max`` count as zero).
    When incomplete, a unit-norm operator orthogonal to every element is
    returned as the defect witness.
    """
    mat = q.coefficient_matrix()
    d2 = q.dim * q.dim
    u, sigma, vh = np.linalg.svd(mat, full_matrices=True)
    if sigma.size == 0 or sigma[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(sigma > RANK_RTOL * sigma[0]))
    complete = rank == d2
    witness = None
    if not complete:
        # Tr[W^dag C_n] = (mat @ conj(vec W))_n, so a null vector of mat is
        # conj(vec W); the witness itself is its conjugate, i.e. a row of vh.
        w = vh[rank, :].reshape(q.dim, q.dim)
        w = _canonical_phase(w / hs_norm(w))
        witness = _frozen(w)
    report = SpanningReport(complete=complete, rank=rank, rank_required=d2, defect_witness=witness)
    report.checks["ii"] = DefinitionCheck(passed=complete, residual=float(d2 - rank))
    return report


def gram_schmidt_basis(
    q: Quorum,
) -> tuple[list[np.ndarray], list[bool], np.ndarray]:
    """Orthonormalize the quorum in the Hilbert-Schmidt inner product.

    Elements whose residual after projecting out the previous basis falls
    below ``DROP_RTOL`` times the largest input norm are linear
    combinations of earlier elements and are eliminated.

    Returns
    -------
    basis : list of ndarray
        Orthonormal operators y_k, one per kept element, in input order.
    kept_mask : list of bool
        True where the corresponding quorum element was retained.
    coeffs : ndarray, shape (n_kept, N)
        Expansion table T with y_k = sum_n T[k, n] C_n; columns of dropped
        elements are zero.
    """
    n = len(q)
    d2 = q.dim * q.dim
    vecs = [c.reshape(-1).astype(complex) for c in q.elements]
    max_norm = max(np.linalg.norm(v) for v in vecs)
    if max_norm == 0.0:
        raise ValueError("cannot orthogonalize an all-zero quorum")
    drop_tol = DROP_RTOL * max_norm

    basis_vecs: list[np.ndarray] = []
    coeff_rows: list[np.ndarray] = []
    kept_mask: list[bool] = []
    for k in range(n):
        v = vecs[k].copy()
        c = np.zeros(n, dtype=complex)
        c[k] = 1.0
        # Two projection sweeps keep the basis orthonormal to roundoff even
        # for badly conditioned inputs.
        for _ in range(2):
            for y, t in zip(basis_vecs, coeff_rows):
                s = np.vdot(y, v)
                v -= s * y
                c -= s * t
        norm = np.linalg.norm(v)
        if norm <= drop_tol:
            kept_mask.append(False)
            continue
        basis_vecs.append(v / norm)
        coeff_rows.append(c / norm)
        kept_mask.append(True)

    coeffs = np.stack(coeff_rows) if coeff_rows else np.zeros((0, n), dtype=complex)
    basis = [y.reshape(q.dim, q.dim) for y in basis_vecs]
    assert len(basis) <= d2
    return basis, kept_mask, coeffs


def dual_via_gram_schmidt(q: Quorum, allow_subspace: bool = False) -> DualFrame:
    """Dual frame from the Gram-Schmidt identity resolution.

    Rewrites 1 = sum_k |y_k>(y_k| over the orthonormalized basis as
    1 = sum_n |C_n>(B_n|, which yields B_n = sum_k conj(T[k, n]) y_k.
    Dropped elements get a zero dual.  For an incomplete quorum the result
    reproduces only the spanned subspace; that is refused unless
    ``allow_subspace`` is set.
    """
    report = completeness_check(q)
    if not report.complete and not allow_subspace:
        raise IncompleteQuorumError(report)
    basis, kept_mask, coeffs = gram_schmidt_basis(q)
    y = np.stack([b.reshape(-1) for b in basis], axis=1) if basis else np.zeros((q.dim**2, 0), complex)
    b_mat = y @ np.conj(coeffs)  # d^2 x N, zero columns at dropped slots
    elements = [b_mat[:, i].reshape(q.dim, q.dim) for i in range(len(q))]
    return DualFrame.from_elements(elements, kept_mask)


def gram_matrix(q: Quorum) -> np.ndarray:
    """Hermitian N x N matrix of pairwise Hilbert-Schmidt products."""
    mat = q.coefficient_matrix()
    return np.conj(mat) @ mat.T


def dual_via_gram_inverse(q: Quorum) -> DualFrame:
    """Dual frame B_n = sum_m (G^-1)_mn C_m from the inverse Gram matrix.

    The index convention makes Tr[B_n^dag C_m] = delta_nm hold exactly.
    Requires linearly independent elements; an ill-conditioned Gram matrix
    (condition number >= 1e12) raises ``SingularGramError``.
    """
    g = gram_matrix(q)
    condition = float(np.linalg.cond(g))
    if not np.isfinite(condition) or condition >= GRAM_CONDITION_CAP:
        raise SingularGramError(condition)
    c = q.coefficient_matrix().T  # d^2 x N, columns vec(C_n)
    # B = C G^-1; G is Hermitian so solve against C^H and conjugate back.
    b_mat = np.linalg.solve(g, c.conj().T).conj().T
    elements = [b_mat[:, i].reshape(q.dim, q.dim) for i in range(len(q))]
    return DualFrame.from_elements(elements, (True,) * len(q))


def reproducing_kernel_residual(q: Quorum, dual: DualFrame) -> float:
    """How far delta(n, n') = Tr[B_n^dag C_n'] is from a reproducing kernel.

    Returns the larger of the two defects
    ``max_n' || sum_n delta(n,n') C_n - C_n' ||`` and
    ``max_n' || sum_n conj(delta(n,n')) B_n - B_n' ||``.
    Both vanish for exact dual pairs on linearly independent quorums.
    """
    if q.dim != dual.dim or len(q) != len(dual):
        raise DimensionMismatchError("quorum and dual frame do not align")
    c = q.coefficient_matrix().T
    b = np.stack([e.reshape(-1) for e in dual.elements], axis=1)
    delta = b.conj().T @ c  # delta[n, n'] = Tr[B_n^dag C_n']
    res_c = np.linalg.norm(c @ delta - c, axis=0).max()
    res_b = np.linalg.norm(b @ np.conj(delta) - b, axis=0).max()
    return float(max(res_c, res_b))


def verify_spanning_definitions(
    q: Quorum, dual: DualFrame, trials: int = 50, seed: int = 42
) -> SpanningReport:
    """Check the four equivalent spanning-set definitions on random operators.

    The four tests are (i) expansion of random operators over the quorum,
    (ii) absence of a null space in the coefficient matrix, (iii) the frame
    super-operator equalling the identity, and (iv) the Parseval-type sum
    rule for the squared norm.  Each trial draws its operator from a
    generator seeded with (seed, trial) so results do not depend on
    evaluation order.  The verdicts must agree; disagreement marks an
    internal inconsistency, not a property of the data.
    """
    if q.dim != dual.dim or len(q) != len(dual):
        raise DimensionMismatchError("quorum and dual frame do not align")
    base = completeness_check(q)

    vc = q.coefficient_matrix().T
    vb = np.stack([e.reshape(-1) for e in dual.elements], axis=1)
    superop = superop_from_frame(q.elements, dual.elements)
    identity = np.eye(q.dim * q.dim, dtype=complex)
    res_iii = float(np.abs(superop - identity).max())

    res_i = 0.0
    res_iv = 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        a = random_operator(q.dim, rng).reshape(-1)
        norm_sq = float(np.real(np.vdot(a, a)))
        recon = vc @ (vb.conj().T @ a)
        res_i = max(res_i, float(np.linalg.norm(a - recon) / (1.0 + np.sqrt(norm_sq))))
        parseval = np.sum(np.conj(vc.conj().T @ a) * (vb.conj().T @ a))
        res_iv = max(res_iv, float(abs(parseval - norm_sq) / (1.0 + norm_sq)))

    checks = {
        "i": DefinitionCheck(passed=res_i <= DEFINITION_TOL, residual=res_i),
        "ii": base.checks["ii"],
        "iii": DefinitionCheck(passed=res_iii <= DEFINITION_TOL, residual=res_iii),
        "iv": DefinitionCheck(passed=res_iv <= DEFINITION_TOL, residual=res_iv),
    }
    verdicts = {name: chk.passed for name, chk in checks.items()}
    agree = len(set(verdicts.values())) == 1
    return SpanningReport(
        complete=base.complete,
        rank=base.rank,
        rank_required=base.rank_required,
        defect_witness=base.defect_witness,
        checks=checks,
        definitions_agree=agree,
    )
