"""Spin-s operator algebra and the concrete spin quorums.

Everything is expressed in the S_z eigenbasis ordered m = -s ... +s, for
states and operators alike.  Three quorums are built here: the Pauli set
{sigma_x, sigma_y, sigma_z, 1} for spin 1/2, the continuous family of spin
components S.n over all directions (verified through the SU(2) group
orthogonality relation), and the Weigert set of (2s+1)^2 rank-1 projectors
onto maximal spin states along generic directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import DualFrame, Quorum, SingularGramError, dual_via_gram_inverse, gram_matrix
from .liouville import as_operator, eig_hermitian, op_exp

# "Almost any" direction choice gives a complete Weigert set; in practice
# we accept it when the Gram matrix is this well conditioned.
WEIGERT_CONDITION_CAP = 1e10


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpinSystem:
    """Spin matrices for s = two_s / 2 in the m-ascending basis."""

    two_s: int
    dim: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray

    @property
    def s(self) -> float:
        return self.two_s / 2.0

    def spin_along(self, n: "Direction | np.ndarray") -> np.ndarray:
        """Spin component S.n for a unit direction."""
        v = n.unit_vector if isinstance(n, Direction) else np.asarray(n, dtype=float)
        return v[0] * self.sx + v[1] * self.sy + v[2] * self.sz


def make_spin_system(two_s: int) -> SpinSystem:
    """Build the ladder, Cartesian and diagonal spin matrices.

    Matrix elements follow <m+1|S+|m> = sqrt(s(s+1) - m(m+1)) with the
    basis index i holding m = i - s.
    """
    if two_s < 0:
        raise ValueError("two_s must be a nonnegative integer")
    s = two_s / 2.0
    d = two_s + 1
    m = np.arange(d) - s
    s_plus = np.zeros((d, d), dtype=complex)
    for i in range(d - 1):
        s_plus[i + 1, i] = math.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
    s_minus = s_plus.conj().T
    sx = (s_plus + s_minus) / 2
    sy = (s_plus - s_minus) / 2j
    sz = np.diag(m).astype(complex)
    return SpinSystem(
        two_s=two_s,
        dim=d,
        sx=_frozen(sx),
        sy=_frozen(sy),
        sz=_frozen(sz),
        s_plus=_frozen(s_plus),
        s_minus=_frozen(s_minus),
    )


@dataclass(frozen=True)
class Direction:
    """Point on the unit sphere given by polar and azimuthal angles."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi + 1e-12):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    def angular_distance(self, other: "Direction") -> float:
        dot = float(np.clip(self.unit_vector @ other.unit_vector, -1.0, 1.0))
        return math.acos(dot)


@dataclass(frozen=True)
class SpinState:
    """Pure state as amplitudes over the m = -s ... +s basis, unit norm."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-12")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def basis_state(system: SpinSystem, m: float) -> SpinState:
    """Eigenstate of S_z with eigenvalue m."""
    idx = m + system.s
    i = int(round(idx))
    if abs(idx - i) > 1e-9 or not (0 <= i < system.dim):
        raise ValueError(f"m = {m} is not in -s..s for s = {system.s}")
    amps = np.zeros(system.dim, dtype=complex)
    amps[i] = 1.0
    return SpinState(amps)


def coherent_state(system: SpinSystem, alpha: complex) -> SpinState:
    """Spin coherent state exp(alpha S+ - conj(alpha) S-) |m = -s>.

    The anti-Hermitian generator is exponentiated as exp(i h) with the
    Hermitian h = i (conj(alpha) S- - alpha S+), so the Hermitian-only
    matrix exponential applies.
    """
    alpha = complex(alpha)
    h = 1j * (np.conj(alpha) * system.s_minus - alpha * system.s_plus)
    u = op_exp(h, 1.0)
    return SpinState(u[:, 0])


def rotation_d(system: SpinSystem, psi: float, n: Direction) -> np.ndarray:
    """Rotation operator exp(i psi S.n); unitary."""
    return op_exp(system.spin_along(n), psi)


def pauli_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(sigma_x, sigma_y, sigma_z) = 2 (S_x, S_y, S_z) in the m-ascending basis.

    Note the basis runs m = -1/2, +1/2, so sigma_z is diag(-1, +1) and
    sigma_y has its signs mirrored relative to the |0>-first textbook
    layout; the operators are the same, only the row order differs.
    """
    sys2 = make_spin_system(1)
    return 2 * sys2.sx, 2 * sys2.sy, 2 * sys2.sz


def pauli_quorum() -> tuple[Quorum, DualFrame]:
    """The spin-1/2 quorum {sigma_x, sigma_y, sigma_z, 1} and its dual.

    The elements are mutually orthogonal with squared norm 2, so the dual
    is simply the quorum halved.
    """
    sx, sy, sz = pauli_matrices()
    eye = np.eye(2, dtype=complex)
    quorum = Quorum.from_elements(
        [sx, sy, sz, eye], labels=["sigma_x", "sigma_y", "sigma_z", "identity"]
    )
    dual = DualFrame.from_elements([sx / 2, sy / 2, sz / 2, eye / 2])
    return quorum, dual


@dataclass(frozen=True)
class WeigertQuorum:
    """Rank-1 projector quorum onto maximal spin states along N_s directions."""

    system: SpinSystem
    directions: tuple[Direction, ...]
    projectors: tuple[np.ndarray, ...]
    dual: DualFrame
    gram_condition: float

    def as_quorum(self) -> Quorum:
        labels = [
            f"n_{k}({d.theta:.12g},{d.phi:.12g})" for k, d in enumerate(self.directions)
        ]
        return Quorum.from_elements(self.projectors, labels)

    def __len__(self) -> int:
        return len(self.projectors)


def max_spin_projector(system: SpinSystem, n: Direction) -> np.ndarray:
    """Projector |n><n| onto the top (eigenvalue s) eigenvector of S.n."""
    _, v = eig_hermitian(system.spin_along(n))
    top = v[:, -1]
    return np.outer(top, top.conj())


def weigert_quorum(system: SpinSystem, directions: list[Direction]) -> WeigertQuorum:
    """Build the (2s+1)^2 projector quorum and its dual for given directions.

    Directions must be pairwise distinct; the dual comes from Gram-matrix
    inversion and the Gram condition number is recorded.  Degenerate
    direction choices (condition >= 1e10) are refused.
    """
    n_required = system.dim * system.dim
    if len(directions) != n_required:
        raise ValueError(
            f"spin s = {system.s} needs exactly {n_required} directions, got {len(directions)}"
        )
    for i in range(len(directions)):
        for j in range(i + 1, len(directions)):
            if directions[i].angular_distance(directions[j]) <= 1e-12:
                raise SingularGramError(
                    float("inf"), detail=f"directions {i} and {j} coincide"
                )
    projectors = [max_spin_projector(system, n) for n in directions]
    labels = [f"n_{k}({d.theta:.12g},{d.phi:.12g})" for k, d in enumerate(directions)]
    quorum = Quorum.from_elements(projectors, labels)
    condition = float(np.linalg.cond(gram_matrix(quorum)))
    if not np.isfinite(condition) or condition >= WEIGERT_CONDITION_CAP:
        raise SingularGramError(condition)
    dual = dual_via_gram_inverse(quorum)
    return WeigertQuorum(
        system=system,
        directions=tuple(directions),
        projectors=tuple(_frozen(p) for p in projectors),
        dual=dual,
        gram_condition=condition,
    )


def tetrahedral_directions() -> list[Direction]:
    """Four directions forming a regular tetrahedron.

    For s = 1/2 these maximize the Gram conditioning of the Weigert
    projector set (the four projectors form a symmetric informationally
    complete family).
    """
    base = math.acos(-1.0 / 3.0)
    return [
        Direction(0.0, 0.0),
        Direction(base, 0.0),
        Direction(base, 2 * math.pi / 3),
        Direction(base, 4 * math.pi / 3),
    ]


def random_directions(count: int, seed: int) -> list[Direction]:
    """Directions drawn uniformly on the sphere (area measure), seeded."""
    rng = np.random.default_rng(seed)
    cos_theta = rng.uniform(-1.0, 1.0, size=count)
    phi = rng.uniform(0.0, 2 * math.pi, size=count)
    return [Direction(math.acos(c), p) for c, p in zip(cos_theta, phi)]


@dataclass(frozen=True)
class QuadratureGrid:
    """Node counts for the product rule on (cos theta, phi, psi).

    Gauss-Legendre in cos(theta) and psi, uniform trapezoid in phi: the
    integrands are polynomial-like in the first two and periodic in phi.
    """

    n_theta: int
    n_phi: int
    n_psi: int

    def __post_init__(self):
        if min(self.n_theta, self.n_phi, self.n_psi) < 8:
            raise ValueError(
                f"degenerate grid {self.n_theta, self.n_phi, self.n_psi}: "
                "all node counts must be >= 8"
            )


def _as_grid(grid) -> QuadratureGrid:
    if isinstance(grid, QuadratureGrid):
        return grid
    nt, nphi, npsi = grid
    return QuadratureGrid(int(nt), int(nphi), int(npsi))


def haar_volume(grid) -> float:
    """Quadrature value of the group volume integral; exact value 4 pi^2."""
    g = _as_grid(grid)
    _, w_cos = np.polynomial.legendre.leggauss(g.n_theta)
    psi_nodes, w_psi = np.polynomial.legendre.leggauss(g.n_psi)
    psi = math.pi * (psi_nodes + 1.0)
    w_psi = math.pi * w_psi
    vol_psi = float(np.sum(w_psi * np.sin(psi / 2) ** 2))
    return float(np.sum(w_cos)) * (2 * math.pi) * vol_psi


def su2_orthogonality_residual(system: SpinSystem, grid) -> float:
    """Residual of the group orthogonality relation for exp(i psi S.n).

    Numerically integrates, with the invariant measure
    sin^2(psi/2) sin(theta) dtheta dphi dpsi and prefactor (2s+1)/(4 pi^2),
    the products <j|exp(i psi n.S)|r><t|exp(-i psi n.S)|k> over the group,
    and returns the maximum deviation from delta_jk delta_tr.
    """
    g = _as_grid(grid)
    d = system.dim
    cos_nodes, w_cos = np.polynomial.legendre.leggauss(g.n_theta)
    psi_nodes, w_psi = np.polynomial.legendre.leggauss(g.n_psi)
    psi = math.pi * (psi_nodes + 1.0)
    w_psi = math.pi * w_psi * np.sin(psi / 2) ** 2
    phi = 2 * math.pi * np.arange(g.n_phi) / g.n_phi
    w_phi = 2 * math.pi / g.n_phi

    spin_stack = np.stack([system.sx, system.sy, system.sz])
    acc = np.zeros((d, d, d, d), dtype=complex)
    # One theta slab at a time keeps memory flat; the slab order is fixed so
    # the summation is deterministic.
    for it in range(g.n_theta):
        ct = cos_nodes[it]
        st = math.sqrt(max(0.0, 1.0 - ct * ct))
        nvec = np.stack([st * np.cos(phi), st * np.sin(phi), np.full_like(phi, ct)], axis=1)
        h = np.einsum("fi,ijk->fjk", nvec, spin_stack)
        lam, vec = np.linalg.eigh(h)
        phases = np.exp(1j * psi[None, :, None] * lam[:, None, :])  # (phi, psi, d)
        u = np.einsum("fij,fpj,fkj->fpik", vec, phases, vec.conj())
        acc += w_cos[it] * w_phi * np.einsum("p,fpjr,fpkt->jrtk", w_psi, u, u.conj())
    acc *= (system.dim) / (4 * math.pi**2)

    eye = np.eye(d)
    target = np.einsum("jk,tr->jrtk", eye, eye)
    return float(np.abs(acc - target).max())
