"""First and second collective moments, modified moments, moment matrices,
reduced one- and two-body states, and closed-form reference moments."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .spin_core import AXES, HalfInt, nematic_q0, spin_operators
from .states import EnsembleShape, QuantumState, _embed, apply_collective, apply_site

# ---------------------------------------------------------------------------
# per-shape collective operator cache (dense path, used for mixed states)
# ---------------------------------------------------------------------------

_SYM_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


def _local_sym(j, k: int, l: int) -> np.ndarray:
    t = spin_operators(j).triple
    return 0.5 * (t[k] @ t[l] + t[l] @ t[k])


class ShapeOperators:
    """Dense collective operators: the three components J_l and the summed
    local symmetric products sum_n (j_k j_l + j_l j_k)^(n) / 2."""

    def __init__(self, shape: EnsembleShape):
        self.shape = shape
        ops = spin_operators(shape.j)
        N, d = shape.N, shape.d
        self.J = [sum(_embed(o, n, N, d) for n in range(N)) for o in ops.triple]
        self.local_sym = {
            (k, l): sum(_embed(_local_sym(shape.j, k, l), n, N, d) for n in range(N))
            for k, l in _SYM_PAIRS
        }


_shape_ops_cache: dict[tuple[int, int], ShapeOperators] = {}


def shape_operators(shape: EnsembleShape) -> ShapeOperators:
    key = (shape.N, shape.j.twice)
    ops = _shape_ops_cache.get(key)
    if ops is None:
        ops = ShapeOperators(shape)
        _shape_ops_cache[key] = ops
    return ops


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------


def check_frame(frame) -> np.ndarray:
    """Validate an orthonormal 3-frame given as rows (e1, e2, e3)."""
    f = np.asarray(frame, dtype=float)
    if f.shape != (3, 3):
        raise ValueError("frame must be three 3-vectors")
    if np.max(np.abs(f @ f.T - np.eye(3))) > 1e-9:
        raise ValueError("frame axes must be orthonormal")
    return f


def frame_with_z_along(direction) -> np.ndarray:
    """Orthonormal frame whose third axis is the given unit vector."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = seed - np.dot(seed, n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return np.array([e1, e2, n])


def random_frame(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[2] = -q[2]
    return q


def random_frames(rng: np.random.Generator, count: int) -> np.ndarray:
    return np.stack([random_frame(rng) for _ in range(count)])


# ---------------------------------------------------------------------------
# moment containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentSet:
    """The six measured collective quantities per axis, plus derived ones.

    jvec[l] = <J_l>, second[l] = <J_l^2>, local_second[l] = sum_n <(j_l^(n))^2>,
    mod_second = second - local_second, var and mod_var the corresponding
    variances.
    """

    shape: EnsembleShape
    jvec: np.ndarray
    second: np.ndarray
    local_second: np.ndarray
    mod_second: np.ndarray
    var: np.ndarray
    mod_var: np.ndarray
    frame: np.ndarray | None = None

    @classmethod
    def from_vectors(cls, shape, jvec, second, local_second, frame=None) -> "MomentSet":
        jvec = np.asarray(jvec, dtype=float)
        second = np.asarray(second, dtype=float)
        local_second = np.asarray(local_second, dtype=float)
        mod_second = second - local_second
        return cls(
            shape=shape,
            jvec=jvec,
            second=second,
            local_second=local_second,
            mod_second=mod_second,
            var=second - jvec**2,
            mod_var=mod_second - jvec**2,
            frame=None if frame is None else check_frame(frame),
        )

    def to_json(self) -> dict:
        out = {
            "schema": 1,
            "N": self.shape.N,
            "two_j": self.shape.j.twice,
            "frame": None if self.frame is None else [list(map(float, row)) for row in self.frame],
        }
        for i, ax in enumerate(AXES):
            out[f"J_{ax}"] = float(self.jvec[i])
            out[f"K_{ax}"] = float(self.second[i])
            out[f"M_{ax}"] = float(self.local_second[i])
            out[f"Kt_{ax}"] = float(self.mod_second[i])
            out[f"var_{ax}"] = float(self.var[i])
            out[f"vart_{ax}"] = float(self.mod_var[i])
        return out


@dataclass(frozen=True)
class MomentMatrices:
    """Correlation matrix C, covariance gamma, nematic tensor Q with its
    isotropic part q0, and the combined matrix (N-1)*gamma + C - N^2*Q."""

    shape: EnsembleShape
    corr: np.ndarray
    cov: np.ndarray
    nematic: np.ndarray
    q0: float
    xmat: np.ndarray
    frame: np.ndarray | None = None


@dataclass(frozen=True)
class ReducedStates:
    """Average one- and two-body reduced density matrices and the pair
    correlations entering the two-body form of the criteria."""

    shape: EnsembleShape
    rho_av1: np.ndarray
    rho_av2: np.ndarray
    pair_corr: np.ndarray  # <j_l (x) j_l>_av2 per axis
    pair_mean: np.ndarray  # <j_l (x) 1>_av2 per axis
    sigma: float  # sum_l <j_l (x) j_l>_av2


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------


def _pure_canonical(psi: np.ndarray, shape: EnsembleShape):
    """(jvec, C, local symmetric moments) of one pure state, matrix-free."""
    ops = spin_operators(shape.j)
    d, N = shape.d, shape.N
    jvec = np.empty(3)
    corr = np.empty((3, 3))
    local = np.empty((3, 3))
    w = [apply_collective(o, psi, d, N) for o in ops.triple]
    for k in range(3):
        jvec[k] = np.real(np.vdot(psi, w[k]))
        for l in range(k, 3):
            corr[k, l] = corr[l, k] = np.real(np.vdot(w[k], w[l]))
    for k, l in _SYM_PAIRS:
        sym = _local_sym(shape.j, k, l)
        val = sum(
            np.real(np.vdot(psi, apply_site(sym, n, psi, d, N))) for n in range(N)
        )
        local[k, l] = local[l, k] = val
    return jvec, corr, local


def _canonical_matrices(state: QuantumState):
    """(jvec, C, Q) in the canonical frame; everything else derives from these."""
    shape = state.shape
    N = shape.N
    q0 = nematic_q0(shape.j)
    if state.kind == "mixed":
        ops = shape_operators(shape)
        rho = state.data
        jvec = np.empty(3)
        corr = np.empty((3, 3))
        local = np.empty((3, 3))
        b = [Jl @ rho for Jl in ops.J]
        for k in range(3):
            jvec[k] = np.real(np.trace(b[k]))
            for l in range(k, 3):
                corr[k, l] = corr[l, k] = np.real(np.sum(ops.J[k].T * b[l]))
        for (k, l), op in ops.local_sym.items():
            local[k, l] = local[l, k] = state.expect(op)
    else:
        jvec = np.zeros(3)
        corr = np.zeros((3, 3))
        local = np.zeros((3, 3))
        for weight, psi in state.pure_parts():
            jv, co, lo = _pure_canonical(psi, shape)
            jvec += weight * jv
            corr += weight * co
            local += weight * lo
    nematic = local / N - q0 * np.eye(3)
    return jvec, corr, nematic


def moment_set_from_matrices(shape, jvec, corr, nematic, frame=None) -> MomentSet:
    """Moment set in an arbitrary frame from the canonical (jvec, C, Q)."""
    q0 = nematic_q0(shape.j)
    if frame is None:
        j_f = np.asarray(jvec, dtype=float)
        second = np.diag(corr).astype(float)
        local = shape.N * (np.diag(nematic) + q0)
    else:
        f = check_frame(frame)
        j_f = f @ jvec
        second = np.einsum("ik,kl,il->i", f, corr, f)
        local = shape.N * (np.einsum("ik,kl,il->i", f, nematic, f) + q0)
    return MomentSet.from_vectors(shape, j_f, second, local, frame)


def moment_set(state: QuantumState, frame=None) -> MomentSet:
    """All first/second/modified moments of the state, optionally in a
    rotated coordinate frame."""
    jvec, corr, nematic = _canonical_matrices(state)
    return moment_set_from_matrices(state.shape, jvec, corr, nematic, frame)


def matrices_from_canonical(shape, jvec, corr, nematic, frame=None) -> MomentMatrices:
    N = shape.N
    cov = corr - np.outer(jvec, jvec)
    xmat = (N - 1) * cov + corr - N**2 * nematic
    return MomentMatrices(
        shape=shape,
        corr=corr,
        cov=cov,
        nematic=nematic,
        q0=nematic_q0(shape.j),
        xmat=xmat,
        frame=None if frame is None else check_frame(frame),
    )


def moment_matrices(state: QuantumState, frame=None) -> MomentMatrices:
    """Correlation, covariance, nematic and combined matrices, optionally
    congruence-transformed into the given frame."""
    jvec, corr, nematic = _canonical_matrices(state)
    if frame is not None:
        f = check_frame(frame)
        jvec = f @ jvec
        corr = f @ corr @ f.T
        nematic = f @ nematic @ f.T
    return matrices_from_canonical(state.shape, jvec, corr, nematic, frame)


# ---------------------------------------------------------------------------
# reduced states
# ---------------------------------------------------------------------------


def partial_trace(rho: np.ndarray, keep, d: int, N: int) -> np.ndarray:
    """Reduce a d^N x d^N density matrix to the sites in `keep` (order kept)."""
    keep = sorted(keep)
    cur = rho.reshape([d] * (2 * N))
    sites = N
    for site in reversed(range(N)):
        if site in keep:
            continue
        cur = np.trace(cur, axis1=site, axis2=site + sites)
        sites -= 1
    k = len(keep)
    return cur.reshape(d**k, d**k)


def _pure_partial(psi: np.ndarray, keep, d: int, N: int) -> np.ndarray:
    keep = sorted(keep)
    traced = [s for s in range(N) if s not in keep]
    t = psi.reshape([d] * N)
    red = np.tensordot(t, t.conj(), axes=(traced, traced))
    k = len(keep)
    return red.reshape(d**k, d**k)


def _reduce_to(state: QuantumState, keep) -> np.ndarray:
    d, N = state.shape.d, state.shape.N
    if state.kind == "mixed":
        return partial_trace(state.data, keep, d, N)
    acc = 0
    for w, psi in state.pure_parts():
        acc = acc + w * _pure_partial(psi, keep, d, N)
    return acc


def _swap_two_body(rho2: np.ndarray, d: int) -> np.ndarray:
    return rho2.reshape(d, d, d, d).transpose(1, 0, 3, 2).reshape(d * d, d * d)


def reduced_states(state: QuantumState) -> ReducedStates:
    """Average one- and two-body reduced states over all sites / ordered pairs."""
    shape = state.shape
    if shape.N < 2:
        raise ValueError("reduced pair states need at least two particles")
    d, N = shape.d, shape.N
    rho1 = np.zeros((d, d), dtype=complex)
    rho2 = np.zeros((d * d, d * d), dtype=complex)
    for n in range(N):
        rho1 += _reduce_to(state, [n])
    rho1 /= N
    for a in range(N):
        for b in range(a + 1, N):
            pair = _reduce_to(state, [a, b])
            rho2 += pair + _swap_two_body(pair, d)
    rho2 /= N * (N - 1)

    ops = spin_operators(shape.j)
    eye = np.eye(d, dtype=complex)
    pair_corr = np.empty(3)
    pair_mean = np.empty(3)
    for l, op in enumerate(ops.triple):
        pair_corr[l] = np.real(np.sum(np.kron(op, op).T * rho2))
        pair_mean[l] = np.real(np.sum(np.kron(op, eye).T * rho2))
    return ReducedStates(
        shape=shape,
        rho_av1=rho1,
        rho_av2=rho2,
        pair_corr=pair_corr,
        pair_mean=pair_mean,
        sigma=float(pair_corr.sum()),
    )


# ---------------------------------------------------------------------------
# closed-form reference moments (exact rational arithmetic)
# ---------------------------------------------------------------------------


def _iso_vector(value: Fraction) -> np.ndarray:
    return np.full(3, float(value))


def singlet_moments(shape: EnsembleShape) -> MomentSet:
    """Closed-form moments of a many-body singlet."""
    j = shape.j.as_fraction
    m = Fraction(shape.N) * j * (j + 1) / 3
    return MomentSet.from_vectors(shape, np.zeros(3), np.zeros(3), _iso_vector(m))


def completely_mixed_moments(shape: EnsembleShape) -> MomentSet:
    """Closed-form moments of the completely mixed state."""
    j = shape.j.as_fraction
    m = Fraction(shape.N) * j * (j + 1) / 3
    return MomentSet.from_vectors(shape, np.zeros(3), _iso_vector(m), _iso_vector(m))


def dicke_local_second_moment(N: int, j, lambda_z) -> Fraction:
    """sum_n <(j_z^(n))^2> of the Dicke state |Nj, lambda_z>."""
    j = HalfInt.of(j).as_fraction
    lz = HalfInt.of(lambda_z).as_fraction
    if int(2 * lz - 2 * N * j) % 2 != 0:
        raise ValueError("lambda_z has wrong parity")
    if abs(lz) > N * j:
        raise ValueError("|lambda_z| exceeds Nj")
    return N * (N - 1) * j**2 / (2 * j * N - 1) + (2 * j - 1) * lz**2 / (2 * N * j - 1)


def dicke_moments(shape: EnsembleShape, lambda_z=0) -> MomentSet:
    """Closed-form moments of the Dicke state |Nj, lambda_z>."""
    j = shape.j.as_fraction
    lz = HalfInt.of(lambda_z).as_fraction
    N = Fraction(shape.N)
    nj = N * j
    k_z = lz**2
    k_perp = (nj * (nj + 1) - k_z) / 2
    m_z = dicke_local_second_moment(shape.N, shape.j, lambda_z)
    m_perp = (N * j * (j + 1) - m_z) / 2
    return MomentSet.from_vectors(
        shape,
        np.array([0.0, 0.0, float(lz)]),
        np.array([float(k_perp), float(k_perp), float(k_z)]),
        np.array([float(m_perp), float(m_perp), float(m_z)]),
    )
