"""Monte Carlo reconstruction of operator mean values from quorum outcomes.

Every estimator follows the same pattern: simulate projective measurements
of the quorum observables on a given state (Born rule), weight each
observed outcome by the matching dual-frame coefficient, and average.  The
weighting makes every single sample an unbiased estimate of Tr[rho A], so
the only error is statistical; error bars come from splitting the sample
stream into contiguous blocks.

Three quorums are supported: a generic discrete quorum of Hermitian
observables with its dual frame, the continuous spin-direction quorum
(one random direction per sample, with the direction integral reduced to
a closed-form outcome kernel), and the Weigert projector quorum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import DualFrame, Quorum
from .liouville import (
    DimensionMismatchError,
    eig_hermitian,
    hermitian_parts,
    is_hermitian,
    require_hermitian,
)
from .spin import Direction, SpinState, SpinSystem, WeigertQuorum


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class MeasurementSetting:
    """A Hermitian observable with its cached eigensystem."""

    observable: np.ndarray
    label: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def measurement_setting(observable: np.ndarray, label: str = "") -> MeasurementSetting:
    obs = np.asarray(observable, dtype=complex)
    require_hermitian(obs, f"observable {label!r}" if label else "observable")
    w, v = eig_hermitian(obs)
    recon = (v * w) @ v.conj().T
    if np.abs(recon - obs).max() > 1e-10:
        raise ValueError(f"eigensystem fails to reconstruct observable {label!r}")
    return MeasurementSetting(
        observable=_frozen(obs), label=label, eigenvalues=_frozen(w), eigenvectors=_frozen(v)
    )


@dataclass(frozen=True)
class OutcomeDistribution:
    """Born probabilities aligned with the setting's ascending eigenvalues."""

    setting: MeasurementSetting
    probabilities: np.ndarray


@dataclass(frozen=True)
class Sample:
    """One simulated measurement: which setting, which eigenvalue index."""

    setting_index: int | Direction | None
    outcome_index: int


@dataclass(frozen=True)
class RunStats:
    """Monte Carlo accumulator: block means, global mean, error bar."""

    n_samples: int
    n_blocks: int
    block_means: tuple[float, ...]
    mean: float
    error_bar: float
    estimator: str | None = None
    seed: int | None = None
    convention: str | None = None


def _state_arrays(state, dim: int) -> tuple[np.ndarray | None, np.ndarray | None]:
    """Return (pure amplitudes, density matrix); exactly one is not None."""
    if isinstance(state, SpinState):
        if state.dim != dim:
            raise DimensionMismatchError(f"state dim {state.dim} != operator dim {dim}")
        return state.amplitudes, None
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        if arr.shape[0] != dim:
            raise DimensionMismatchError(f"state dim {arr.shape[0]} != operator dim {dim}")
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state vector norm {norm} deviates from 1")
        return arr, None
    if arr.shape != (dim, dim):
        raise DimensionMismatchError(f"density matrix shape {arr.shape}, expected {(dim, dim)}")
    require_hermitian(arr, "density matrix")
    trace = np.trace(arr).real
    if abs(trace - 1.0) > 1e-10:
        raise ValueError(f"density matrix trace {trace} deviates from 1")
    if np.linalg.eigvalsh(arr).min() < -1e-10:
        raise ValueError("density matrix is not positive semidefinite")
    return None, arr


def state_expectation(state, a: np.ndarray) -> complex:
    """Exact mean value Tr[rho a] of the operator on the state."""
    a = np.asarray(a, dtype=complex)
    psi, rho = _state_arrays(state, a.shape[0])
    if psi is not None:
        return complex(psi.conj() @ a @ psi)
    return complex(np.trace(rho @ a))


def born_distribution(state, setting: MeasurementSetting) -> OutcomeDistribution:
    """Outcome probabilities p_m = <v_m|rho|v_m> over the setting's eigenvectors.

    Degenerate eigenvalues keep separate eigenvector slots; aggregation by
    eigenvalue happens automatically wherever outcomes enter only through
    their eigenvalue.
    """
    v = setting.eigenvectors
    psi, rho = _state_arrays(state, v.shape[0])
    if psi is not None:
        p = np.abs(v.conj().T @ psi) ** 2
    else:
        p = np.einsum("ik,ij,jk->k", v.conj(), rho, v).real
    if p.min() < -1e-12 or p.max() > 1.0 + 1e-12:
        raise ValueError(f"Born probabilities outside [0, 1]: range [{p.min()}, {p.max()}]")
    p = np.clip(p, 0.0, 1.0)
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"Born probabilities sum to {p.sum()}, expected 1")
    return OutcomeDistribution(setting=setting, probabilities=_frozen(p))


def sample_outcomes(
    dist: OutcomeDistribution,
    count: int,
    seed,
    setting_index: int | Direction | None = None,
) -> list[Sample]:
    """Draw i.i.d. outcome indices by inverse CDF; deterministic per seed."""
    if count < 1:
        raise ValueError("count must be >= 1")
    p = dist.probabilities / dist.probabilities.sum()
    cdf = np.cumsum(p)
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, p.size - 1)
    return [Sample(setting_index=setting_index, outcome_index=int(i)) for i in idx]


def _block_sizes(total: int, n_blocks: int) -> np.ndarray:
    """Contiguous near-equal split; the first total % n_blocks blocks are longer."""
    base, extra = divmod(total, n_blocks)
    return np.array([base + 1] * extra + [base] * (n_blocks - extra))


def block_stats(contributions, n_blocks: int = 20) -> RunStats:
    """Blocked mean and error bar of a stream of per-sample contributions.

    The stream is split in order into ``n_blocks`` contiguous near-equal
    blocks; the error bar is the sample standard deviation of the block
    means divided by sqrt(n_blocks).
    """
    values = np.asarray(contributions, dtype=float)
    if n_blocks < 2:
        raise ValueError("n_blocks must be >= 2")
    if values.size < n_blocks:
        raise ValueError(f"{values.size} contributions cannot fill {n_blocks} blocks")
    sizes = _block_sizes(values.size, n_blocks)
    bounds = np.cumsum(sizes)[:-1]
    block_means = np.array([b.mean() for b in np.split(values, bounds)])
    return _stats_from_blocks(block_means, sizes, int(values.size))


def _stats_from_blocks(
    block_means: np.ndarray,
    sizes: np.ndarray,
    n_samples: int,
    estimator: str | None = None,
    seed: int | None = None,
    convention: str | None = None,
) -> RunStats:
    mean = float(np.sum(block_means * sizes) / np.sum(sizes))
    error = float(np.std(block_means, ddof=1) / np.sqrt(block_means.size))
    return RunStats(
        n_samples=n_samples,
        n_blocks=int(block_means.size),
        block_means=tuple(float(b) for b in block_means),
        mean=mean,
        error_bar=error,
        estimator=estimator,
        seed=seed,
        convention=convention,
    )


# ---------------------------------------------------------------------------
# discrete quorums (generic Hermitian observables with a dual frame)

def _discrete_tables(a: np.ndarray, quorum: Quorum, dual: DualFrame):
    """Per-setting eigensystems and outcome-value tables.

    A sample of setting x with outcome index m contributes
    eigenvalue_m * Tr[B_x^dag a].  Settings whose observable has a single
    distinct eigenvalue (e.g. the identity) contribute that value exactly
    and consume no samples.
    """
    a = np.asarray(a, dtype=complex)
    require_hermitian(a, "target operator")
    if quorum.dim != a.shape[0]:
        raise DimensionMismatchError(f"quorum dim {quorum.dim} != operator dim {a.shape[0]}")
    if dual.dim != quorum.dim or len(dual) != len(quorum):
        raise DimensionMismatchError("dual frame does not align with the quorum")
    active: list[tuple[np.ndarray, np.ndarray]] = []  # (eigenvectors, values)
    constant = 0.0
    for c, b, label in zip(quorum.elements, dual.elements, quorum.labels):
        require_hermitian(c, f"quorum element {label!r}")
        w, v = eig_hermitian(c)
        coeff = complex(np.vdot(b, a))
        if abs(coeff.imag) > 1e-8 * (1.0 + abs(coeff)):
            raise ValueError(f"non-real dual coefficient for setting {label!r}: {coeff}")
        values = w * coeff.real
        spread = w.max() - w.min()
        if spread <= 1e-12 * (1.0 + np.abs(w).max()):
            constant += float(values.mean())
        else:
            active.append((v, values))
    return active, constant


def _born_rows(state, eigvec_list: list[np.ndarray]) -> np.ndarray:
    rows = []
    for v in eigvec_list:
        psi, rho = _state_arrays(state, v.shape[0])
        if psi is not None:
            p = np.abs(v.conj().T @ psi) ** 2
        else:
            p = np.einsum("ik,ij,jk->k", v.conj(), rho, v).real
        rows.append(np.clip(p, 0.0, 1.0))
    return np.stack(rows)


def _draw_outcomes(cdf_row: np.ndarray, u: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cdf_row, u, side="right")
    return np.minimum(idx, cdf_row.size - 1)


def estimate_discrete(
    a: np.ndarray,
    quorum: Quorum,
    dual: DualFrame,
    state,
    samples_per_setting: int,
    *,
    n_blocks: int = 20,
    seed: int = 42,
    selection: str = "quota",
) -> RunStats:
    """Reconstruct <a> from simulated measurements of a discrete quorum.

    With ``selection="quota"`` every sampled setting receives exactly
    ``samples_per_setting`` shots; block means average within each setting
    and sum across settings.  With ``selection="uniform"`` the same total
    budget is spent on uniformly random settings and each contribution is
    scaled by the number of sampled settings.  Both are unbiased; the
    variance differs.  Blocks draw from generators seeded per
    (seed, block), so results do not depend on worker scheduling.
    """
    if selection not in ("quota", "uniform"):
        raise ValueError(f"unknown selection convention {selection!r}")
    if n_blocks < 2:
        raise ValueError("n_blocks must be >= 2")
    active, constant = _discrete_tables(a, quorum, dual)
    if not active:
        block_means = np.full(n_blocks, constant)
        return _stats_from_blocks(
            block_means, np.ones(n_blocks, dtype=int), 0, "discrete", seed,
            "per_setting_quota" if selection == "quota" else "uniform_setting",
        )
    if samples_per_setting < n_blocks:
        raise ValueError(
            f"samples_per_setting = {samples_per_setting} cannot fill {n_blocks} blocks"
        )
    probs = _born_rows(state, [v for v, _ in active])
    cdfs = np.cumsum(probs / probs.sum(axis=1, keepdims=True), axis=1)
    values = np.stack([val for _, val in active])
    n_active = len(active)

    if selection == "quota":
        sizes = _block_sizes(samples_per_setting, n_blocks)
        block_means = np.zeros(n_blocks)
        for bi, nb in enumerate(sizes):
            acc = constant
            for j in range(n_active):
                rng = np.random.default_rng([seed, bi, j])
                idx = _draw_outcomes(cdfs[j], rng.random(nb))
                acc += float(values[j, idx].mean())
            block_means[bi] = acc
        return _stats_from_blocks(
            block_means, sizes, samples_per_setting * n_active,
            "discrete", seed, "per_setting_quota",
        )

    total = samples_per_setting * n_active
    sizes = _block_sizes(total, n_blocks)
    block_means = np.zeros(n_blocks)
    for bi, nb in enumerate(sizes):
        rng = np.random.default_rng([seed, bi])
        x = rng.integers(0, n_active, size=nb)
        u = rng.random(nb)
        idx = np.minimum((cdfs[x] <= u[:, None]).sum(axis=1), values.shape[1] - 1)
        block_means[bi] = constant + float((n_active * values[x, idx]).mean())
    return _stats_from_blocks(block_means, sizes, total, "discrete", seed, "uniform_setting")


def discrete_exact_value(a: np.ndarray, quorum: Quorum, dual: DualFrame, state) -> float:
    """The estimator's target with exact Born probabilities substituted.

    Equals Tr[rho a] identically whenever (quorum, dual) is a spanning
    pair, which is the content of the reconstruction identity.
    """
    active, constant = _discrete_tables(a, quorum, dual)
    if not active:
        return constant
    probs = _born_rows(state, [v for v, _ in active])
    values = np.stack([val for _, val in active])
    return constant + float(np.sum(probs * values))


# ---------------------------------------------------------------------------
# continuous quorum: spin component along every direction

def _direction_kernel_rows(a_diag: np.ndarray, dim: int) -> np.ndarray:
    """Outcome kernel for each row of eigenbasis diagonals of the target.

    With A_m the diagonal matrix elements of the target in the S.n
    eigenbasis (ascending m), the per-outcome contribution is
    (2s+1) * (A_m - A_{m+1}/2 - A_{m-1}/2), out-of-range terms zero.
    The scaling makes the estimator, averaged over uniformly random
    directions and Born-distributed outcomes, exactly unbiased.
    """
    padded = np.pad(a_diag, [(0, 0)] * (a_diag.ndim - 1) + [(1, 1)])
    center = padded[..., 1:-1]
    upper = padded[..., 2:]
    lower = padded[..., :-2]
    return dim * (center - 0.5 * upper - 0.5 * lower)


def continuous_kernel(a: np.ndarray, system: SpinSystem, m: float, n: Direction) -> float:
    """Closed-form outcome weight for measuring S.n with result m.

    Equals (2s+1)/pi times the integral over psi in [0, 2pi) of
    sin^2(psi/2) Tr[a exp(-i psi (S.n - m))]; the integral collapses to
    the three diagonal elements at m and m +- 1 because the psi average
    of sin^2(psi/2) e^{-i k psi} vanishes for |k| > 1.
    """
    a = np.asarray(a, dtype=complex)
    require_hermitian(a, "target operator")
    if a.shape[0] != system.dim:
        raise DimensionMismatchError(f"operator dim {a.shape[0]} != spin dim {system.dim}")
    idx_f = m + system.s
    idx = int(round(idx_f))
    if abs(idx_f - idx) > 1e-9 or not (0 <= idx < system.dim):
        raise ValueError(f"m = {m} is not an eigenvalue of a spin-{system.s} component")
    _, v = eig_hermitian(system.spin_along(n))
    diag = np.einsum("ik,ij,jk->k", v.conj(), a, v).real
    return float(_direction_kernel_rows(diag, system.dim)[idx])


def estimate_continuous(
    a: np.ndarray,
    system: SpinSystem,
    state,
    n_samples: int,
    *,
    n_blocks: int = 20,
    seed: int = 42,
) -> RunStats:
    """Reconstruct <a> by measuring S.n along uniformly random directions.

    Each sample draws one direction (cos theta uniform, phi uniform),
    simulates a single measurement of S.n, and accumulates the closed-form
    outcome kernel.  Blocks own derived seeds (seed, block) and are merged
    in a fixed order, so the result is reproducible for any worker count.
    """
    a = np.asarray(a, dtype=complex)
    require_hermitian(a, "target operator")
    if a.shape[0] != system.dim:
        raise DimensionMismatchError(f"operator dim {a.shape[0]} != spin dim {system.dim}")
    if n_blocks < 2:
        raise ValueError("n_blocks must be >= 2")
    if n_samples < n_blocks:
        raise ValueError(f"n_samples = {n_samples} cannot fill {n_blocks} blocks")
    psi_amp, rho = _state_arrays(state, system.dim)
    spin_stack = np.stack([system.sx, system.sy, system.sz])
    d = system.dim

    sizes = _block_sizes(n_samples, n_blocks)
    block_means = np.zeros(n_blocks)
    for bi, nb in enumerate(sizes):
        rng = np.random.default_rng([seed, bi])
        cos_t = rng.uniform(-1.0, 1.0, size=nb)
        phi = rng.uniform(0.0, 2 * np.pi, size=nb)
        u = rng.random(nb)
        sin_t = np.sqrt(1.0 - cos_t**2)
        nvec = np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=1)
        h = np.einsum("fi,ijk->fjk", nvec, spin_stack)
        _, vec = np.linalg.eigh(h)
        if psi_amp is not None:
            p = np.abs(np.einsum("fik,i->fk", vec.conj(), psi_amp)) ** 2
        else:
            p = np.einsum("fik,ij,fjk->fk", vec.conj(), rho, vec).real
        p = np.clip(p, 0.0, 1.0)
        cdf = np.cumsum(p / p.sum(axis=1, keepdims=True), axis=1)
        idx = np.minimum((cdf <= u[:, None]).sum(axis=1), d - 1)
        diag = np.einsum("fik,ij,fjk->fk", vec.conj(), a, vec).real
        kernels = _direction_kernel_rows(diag, d)
        block_means[bi] = float(kernels[np.arange(nb), idx].mean())
    return _stats_from_blocks(
        block_means, sizes, n_samples, "continuous", seed, "uniform_direction"
    )


def continuous_exact_value(
    a: np.ndarray,
    system: SpinSystem,
    state,
    n_theta: int | None = None,
    n_phi: int | None = None,
) -> float:
    """Direction-and-outcome average of the kernel with exact probabilities.

    The integrand is a spherical polynomial of degree <= 4s, so the default
    Gauss-Legendre x trapezoid grid integrates it exactly; the result is
    Tr[rho a] up to roundoff.
    """
    a = np.asarray(a, dtype=complex)
    require_hermitian(a, "target operator")
    if n_theta is None:
        n_theta = system.two_s + 4
    if n_phi is None:
        n_phi = 2 * system.two_s + 6
    cos_nodes, w_cos = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    w_phi = 2 * np.pi / n_phi
    spin_stack = np.stack([system.sx, system.sy, system.sz])
    psi_amp, rho = _state_arrays(state, system.dim)

    sin_nodes = np.sqrt(1.0 - cos_nodes**2)
    nvec = np.stack(
        [
            np.outer(sin_nodes, np.cos(phi)).reshape(-1),
            np.outer(sin_nodes, np.sin(phi)).reshape(-1),
            np.repeat(cos_nodes, n_phi),
        ],
        axis=1,
    )
    weights = np.repeat(w_cos * w_phi, n_phi)
    h = np.einsum("fi,ijk->fjk", nvec, spin_stack)
    _, vec = np.linalg.eigh(h)
    if psi_amp is not None:
        p = np.abs(np.einsum("fik,i->fk", vec.conj(), psi_amp)) ** 2
    else:
        p = np.einsum("fik,ij,fjk->fk", vec.conj(), rho, vec).real
    diag = np.einsum("fik,ij,fjk->fk", vec.conj(), a, vec).real
    kernels = _direction_kernel_rows(diag, system.dim)
    return float(np.sum(weights * np.sum(p * kernels, axis=1)) / (4 * np.pi))


# ---------------------------------------------------------------------------
# Weigert projector quorum

def _weigert_tables(a: np.ndarray, wq: WeigertQuorum, scale_by_spin: bool):
    a = np.asarray(a, dtype=complex)
    require_hermitian(a, "target operator")
    if a.shape[0] != wq.system.dim:
        raise DimensionMismatchError(
            f"operator dim {a.shape[0]} != spin dim {wq.system.dim}"
        )
    d = wq.system.dim
    factor = wq.system.s if scale_by_spin else 1.0
    eigvecs = []
    values = np.zeros((len(wq), d))
    for k, (n, b) in enumerate(zip(wq.directions, wq.dual.elements)):
        _, v = eig_hermitian(wq.system.spin_along(n))
        eigvecs.append(v)
        coeff = complex(np.vdot(b, a))
        if abs(coeff.imag) > 1e-8 * (1.0 + abs(coeff)):
            raise ValueError(f"non-real dual coefficient for direction {k}: {coeff}")
        # Only the maximal outcome m = s carries weight: the estimator is
        # sum_k p(s, n_k) Tr[a Q^k].
        values[k, d - 1] = factor * coeff.real
    return eigvecs, values


def estimate_weigert(
    a: np.ndarray,
    wq: WeigertQuorum,
    state,
    samples_per_direction: int,
    *,
    n_blocks: int = 20,
    seed: int = 42,
    scale_by_spin: bool = False,
) -> RunStats:
    """Reconstruct <a> from the frequencies of maximal outcomes of S.n_k.

    Each direction k gets ``samples_per_direction`` shots; the in-block
    frequency of the top outcome estimates p(s, n_k), weighted by
    Tr[a Q^k] over the dual projectors.  ``scale_by_spin`` multiplies each
    term by s; that variant fails the exact-probability identity for
    s != 1 and is kept only for comparison.
    """
    if n_blocks < 2:
        raise ValueError("n_blocks must be >= 2")
    if samples_per_direction < n_blocks:
        raise ValueError(
            f"samples_per_direction = {samples_per_direction} cannot fill {n_blocks} blocks"
        )
    eigvecs, values = _weigert_tables(a, wq, scale_by_spin)
    probs = _born_rows(state, eigvecs)
    cdfs = np.cumsum(probs / probs.sum(axis=1, keepdims=True), axis=1)
    sizes = _block_sizes(samples_per_direction, n_blocks)
    block_means = np.zeros(n_blocks)
    for bi, nb in enumerate(sizes):
        acc = 0.0
        for k in range(len(wq)):
            rng = np.random.default_rng([seed, bi, k])
            idx = _draw_outcomes(cdfs[k], rng.random(nb))
            acc += float(values[k, idx].mean())
        block_means[bi] = acc
    return _stats_from_blocks(
        block_means, sizes, samples_per_direction * len(wq),
        "weigert", seed, "per_direction_quota",
    )


def weigert_exact_value(
    a: np.ndarray, wq: WeigertQuorum, state, scale_by_spin: bool = False
) -> float:
    """Weigert estimator with exact Born probabilities; Tr[rho a] when unscaled."""
    eigvecs, values = _weigert_tables(a, wq, scale_by_spin)
    probs = _born_rows(state, eigvecs)
    return float(np.sum(probs * values))


# ---------------------------------------------------------------------------
# non-Hermitian targets via the Hermitian / anti-Hermitian split

@dataclass(frozen=True)
class ComplexEstimate:
    """Component-wise statistics for a general (non-Hermitian) target."""

    mean: complex
    real_part: RunStats
    imag_part: RunStats


def estimate_discrete_complex(
    a: np.ndarray,
    quorum: Quorum,
    dual: DualFrame,
    state,
    samples_per_setting: int,
    *,
    n_blocks: int = 20,
    seed: int = 42,
    selection: str = "quota",
) -> ComplexEstimate:
    """Estimate a general operator by splitting it as a = h + i k.

    Both Hermitian parts are estimated independently with derived seeds
    and reported with their own error bars.
    """
    a = np.asarray(a, dtype=complex)
    h, k = hermitian_parts(a)
    seeds = [int(s) for s in np.random.SeedSequence([seed]).generate_state(2)]
    stats_h = estimate_discrete(
        h, quorum, dual, state, samples_per_setting,
        n_blocks=n_blocks, seed=seeds[0], selection=selection,
    )
    if is_hermitian(a):
        zero = RunStats(
            n_samples=0, n_blocks=n_blocks, block_means=(0.0,) * n_blocks,
            mean=0.0, error_bar=0.0, estimator="discrete", seed=seeds[1],
            convention=stats_h.convention,
        )
        return ComplexEstimate(mean=complex(stats_h.mean), real_part=stats_h, imag_part=zero)
    stats_k = estimate_discrete(
        k, quorum, dual, state, samples_per_setting,
        n_blocks=n_blocks, seed=seeds[1], selection=selection,
    )
    return ComplexEstimate(
        mean=complex(stats_h.mean, stats_k.mean), real_part=stats_h, imag_part=stats_k
    )
