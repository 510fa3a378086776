"""Many-body ensemble states: collective operators, named entangled and
separable states, thermal states, noise mixing and serialization.

Pure states and weighted mixtures of pure product states are handled without
ever forming D x D matrices, so product-structured states work at particle
numbers where dense density matrices would not fit in memory.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .spin_core import (
    DERIVED_TOL,
    HalfInt,
    _as_spin,
    expectation,
    spin_coherent_state,
    spin_operators,
)

DEFAULT_GUARD_DIM = 2**16
GUARD_ENV_VAR = "SPINSQ_GUARD_DIM"


class CapacityError(Exception):
    """Total Hilbert-space dimension exceeds the configured guard."""

    def __init__(self, dim: int, guard: int):
        self.dim = dim
        self.guard = guard
        super().__init__(
            f"total dimension D = {dim} exceeds the dimension guard {guard}; "
            f"raise it explicitly (guard argument, --guard-dim or {GUARD_ENV_VAR})"
        )


def guard_dim(override: int | None = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get(GUARD_ENV_VAR)
    return int(env) if env else DEFAULT_GUARD_DIM


@dataclass(frozen=True)
class EnsembleShape:
    """N spin-j particles; d = 2j+1 local and D = d^N total dimension."""

    N: int
    j: HalfInt

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"particle count must be >= 1, got {self.N}")
        object.__setattr__(self, "j", _as_spin(self.j))

    @classmethod
    def make(cls, N: int, j, guard: int | None = None) -> "EnsembleShape":
        shape = cls(int(N), HalfInt.of(j))
        shape.check_guard(guard)
        return shape

    @property
    def d(self) -> int:
        return self.j.twice + 1

    @property
    def D(self) -> int:
        return self.d**self.N

    @property
    def Nj(self) -> float:
        return self.N * self.j.value

    def check_guard(self, guard: int | None = None) -> "EnsembleShape":
        limit = guard_dim(guard)
        if self.D > limit:
            raise CapacityError(self.D, limit)
        return self


def apply_site(op: np.ndarray, site: int, psi: np.ndarray, d: int, N: int) -> np.ndarray:
    """Apply a single-particle operator to one tensor factor of a pure state."""
    t = psi.reshape(d**site, d, d ** (N - site - 1))
    return np.einsum("ab,xbz->xaz", op, t).reshape(-1)


def apply_collective(op: np.ndarray, psi: np.ndarray, d: int, N: int) -> np.ndarray:
    """Apply sum_n op^(n) to a pure state without building the D x D matrix."""
    out = np.zeros_like(psi)
    for n in range(N):
        out += apply_site(op, n, psi, d, N)
    return out


def apply_local_product(op: np.ndarray, psi: np.ndarray, d: int, N: int) -> np.ndarray:
    """Apply op (x) op (x) ... (x) op to a pure state site by site."""
    for n in range(N):
        psi = apply_site(op, n, psi, d, N)
    return psi


@dataclass(frozen=True)
class QuantumState:
    """State of the ensemble: a pure D-vector, a dense D x D density matrix,
    or a weighted mixture of pure D-vectors (kept unmaterialized)."""

    shape: EnsembleShape
    data: np.ndarray | None = None
    components: tuple | None = None  # ((weight, vector), ...)

    def __post_init__(self):
        D = self.shape.D
        if (self.data is None) == (self.components is None):
            raise ValueError("pass exactly one of data or components")
        if self.data is not None:
            arr = np.asarray(self.data, dtype=complex)
            if arr.ndim == 1:
                if arr.shape != (D,):
                    raise ValueError(f"pure state must have length {D}, got {arr.shape}")
                if abs(np.linalg.norm(arr) - 1.0) > DERIVED_TOL:
                    raise ValueError("pure state must be normalized")
            elif arr.ndim == 2:
                if arr.shape != (D, D):
                    raise ValueError(f"density matrix must be {D}x{D}, got {arr.shape}")
                if np.max(np.abs(arr - arr.conj().T)) > DERIVED_TOL:
                    raise ValueError("density matrix must be Hermitian")
                if abs(np.trace(arr).real - 1.0) > DERIVED_TOL:
                    raise ValueError("density matrix must have unit trace")
                if np.linalg.eigvalsh(arr)[0] < -1e-9:
                    raise ValueError("density matrix must be positive semidefinite")
            else:
                raise ValueError("state data must be a vector or a square matrix")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, "data", arr)
        else:
            comps = []
            total = 0.0
            for weight, vec in self.components:
                w = float(weight)
                if w < -1e-12:
                    raise ValueError("mixture weights must be nonnegative")
                v = np.asarray(vec, dtype=complex)
                if v.shape != (D,):
                    raise ValueError(f"component must have length {D}, got {v.shape}")
                if abs(np.linalg.norm(v) - 1.0) > DERIVED_TOL:
                    raise ValueError("mixture components must be normalized")
                v = v.copy()
                v.flags.writeable = False
                comps.append((max(w, 0.0), v))
                total += w
            if abs(total - 1.0) > DERIVED_TOL:
                raise ValueError(f"mixture weights must sum to 1, got {total}")
            object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def mixture(cls, shape: EnsembleShape, pairs) -> "QuantumState":
        pairs = [(w, v) for w, v in pairs if w > 1e-15]
        if len(pairs) == 1 and abs(pairs[0][0] - 1.0) < 1e-12:
            return cls(shape, pairs[0][1])
        return cls(shape, None, tuple(pairs))

    @property
    def is_pure(self) -> bool:
        return self.data is not None and self.data.ndim == 1

    @property
    def kind(self) -> str:
        if self.components is not None:
            return "ensemble"
        return "pure" if self.data.ndim == 1 else "mixed"

    def pure_parts(self):
        """(weight, vector) decomposition for pure and ensemble states."""
        if self.is_pure:
            return ((1.0, self.data),)
        if self.components is not None:
            return self.components
        raise ValueError("dense mixed state has no pure-part decomposition")

    def rho(self) -> np.ndarray:
        """Dense density matrix (materializes ensembles)."""
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        if self.components is not None:
            acc = np.zeros((self.shape.D, self.shape.D), dtype=complex)
            for w, v in self.components:
                acc += w * np.outer(v, v.conj())
            return acc
        return self.data

    def expect(self, op: np.ndarray) -> float:
        if self.components is not None:
            return sum(w * expectation(op, v) for w, v in self.components)
        return expectation(op, self.data)


def _embed(op: np.ndarray, site: int, N: int, d: int) -> np.ndarray:
    eye = np.eye(d, dtype=complex)
    factors = [eye] * N
    factors[site] = op
    return reduce(np.kron, factors)


def collective_operator(shape: EnsembleShape, axis, guard: int | None = None) -> np.ndarray:
    """Dense collective component J_axis = sum_n j_axis^(n)."""
    shape.check_guard(guard)
    ops = spin_operators(shape.j)
    if isinstance(axis, str):
        local = {"x": ops.jx, "y": ops.jy, "z": ops.jz}[axis]
    else:
        local = ops.along(axis)
    return sum(_embed(local, n, shape.N, shape.d) for n in range(shape.N))


def collective_triple(shape: EnsembleShape, guard: int | None = None):
    return tuple(collective_operator(shape, ax, guard) for ax in ("x", "y", "z"))


def _local_rotation(shape: EnsembleShape, axis, angle: float) -> np.ndarray:
    ops = spin_operators(shape.j)
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    w, v = np.linalg.eigh(ops.along(n))
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


def collective_rotation(shape: EnsembleShape, axis, angle: float) -> np.ndarray:
    """Dense exp(-i*angle*J_axis) = tensor power of the one-particle rotation."""
    u1 = _local_rotation(shape, axis, angle)
    return reduce(np.kron, [u1] * shape.N)


def rotate_state(state: QuantumState, axis, angle: float) -> QuantumState:
    """Collective rotation of the state; pure parts are rotated site by site."""
    shape = state.shape
    u1 = _local_rotation(shape, axis, angle)
    if state.kind == "mixed":
        u = collective_rotation(shape, axis, angle)
        return QuantumState(shape, u @ state.data @ u.conj().T)
    parts = [
        (w, apply_local_product(u1, v, shape.d, shape.N)) for w, v in state.pure_parts()
    ]
    return QuantumState.mixture(shape, parts)


# ---------------------------------------------------------------------------
# named states
# ---------------------------------------------------------------------------


def coherent_ensemble(shape: EnsembleShape, direction, guard: int | None = None) -> QuantumState:
    """Product of N identical spin coherent states along `direction`."""
    shape.check_guard(guard)
    single = spin_coherent_state(shape.j, direction)
    return QuantumState(shape, reduce(np.kron, [single] * shape.N))


def completely_mixed(shape: EnsembleShape, guard: int | None = None) -> QuantumState:
    shape.check_guard(guard)
    return QuantumState(shape, np.eye(shape.D, dtype=complex) / shape.D)


def dicke_state(shape: EnsembleShape, lambda_z, guard: int | None = None) -> QuantumState:
    """Symmetric Dicke state |Nj, lambda_z>: maximal total spin, J_z eigenvalue
    lambda_z. Built by repeated collective lowering from the all-highest product."""
    shape.check_guard(guard)
    lz = HalfInt.of(lambda_z)
    twice_nj = shape.N * shape.j.twice
    if (lz.twice - twice_nj) % 2 != 0:
        raise ValueError(f"lambda_z = {lz} has wrong parity for N = {shape.N}, j = {shape.j}")
    if abs(lz.twice) > twice_nj:
        raise ValueError(f"|lambda_z| = {abs(lz.value)} exceeds Nj = {twice_nj / 2}")
    lowering_steps = (twice_nj - lz.twice) // 2
    psi = np.zeros(shape.D, dtype=complex)
    psi[0] = 1.0  # all particles in m = +j
    ops = spin_operators(shape.j)
    jminus = (ops.jx - 1j * ops.jy)
    for _ in range(lowering_steps):
        psi = apply_collective(jminus, psi, shape.d, shape.N)
        psi /= np.linalg.norm(psi)
    return QuantumState(shape, psi)


def alpha_product_state(N: int, alpha: float, guard: int | None = None) -> QuantumState:
    """Product of N identical spin-1 particles in sqrt(alpha)|m=1> + sqrt(1-alpha)|m=0>."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    shape = EnsembleShape.make(N, 1, guard)
    single = np.array([math.sqrt(alpha), math.sqrt(1.0 - alpha), 0.0], dtype=complex)
    return QuantumState(shape, reduce(np.kron, [single] * N))


SINGLET_VARIANTS = ("pair_product", "permutation_invariant", "spin1_pair", "projector")

# explicit permutation averaging up to this N, projector beyond
_PERMUTATION_AVERAGE_MAX_N = 6


def _pair_singlet_qubits() -> np.ndarray:
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0 / math.sqrt(2.0)  # |up, down>
    psi[2] = -1.0 / math.sqrt(2.0)  # |down, up>
    return psi


def _permute_pure(psi: np.ndarray, perm, d: int) -> np.ndarray:
    """Reorder tensor factors: output site i carries input site perm[i]."""
    N = len(perm)
    return psi.reshape([d] * N).transpose(perm).reshape(-1)


def singlet_subspace_projector(shape: EnsembleShape) -> np.ndarray:
    """Projector onto the null space of J_x^2 + J_y^2 + J_z^2."""
    jx, jy, jz = collective_triple(shape)
    j2 = jx @ jx + jy @ jy + jz @ jz
    w, v = np.linalg.eigh(j2)
    sel = w < 1e-9
    if not np.any(sel):
        raise ValueError(f"no singlet subspace for N = {shape.N}, j = {shape.j}")
    vs = v[:, sel]
    return vs @ vs.conj().T


def singlet_state(shape: EnsembleShape, variant: str = "projector", guard: int | None = None) -> QuantumState:
    """Many-body singlet: zero mean and zero second moment for all collective
    spin components.

    Variants: 'pair_product' (qubits, tensor power of two-particle singlets),
    'permutation_invariant' (its permutation average), 'spin1_pair' (the
    symmetric two-particle spin-1 singlet), 'projector' (uniform mixture over
    the null space of the total spin squared).
    """
    shape.check_guard(guard)
    if variant not in SINGLET_VARIANTS:
        raise ValueError(f"unknown singlet variant {variant!r}; options: {SINGLET_VARIANTS}")
    if variant == "pair_product":
        if shape.j.twice != 1 or shape.N % 2:
            raise ValueError("pair_product singlet requires j = 1/2 and even N")
        psi = reduce(np.kron, [_pair_singlet_qubits()] * (shape.N // 2))
        return QuantumState(shape, psi)
    if variant == "permutation_invariant":
        if shape.j.twice != 1 or shape.N % 2:
            raise ValueError("permutation_invariant singlet requires j = 1/2 and even N")
        if shape.N > _PERMUTATION_AVERAGE_MAX_N:
            return singlet_state(shape, "projector", guard)
        base = reduce(np.kron, [_pair_singlet_qubits()] * (shape.N // 2))
        perms = list(itertools.permutations(range(shape.N)))
        weight = 1.0 / len(perms)
        parts = [(weight, _permute_pure(base, perm, shape.d)) for perm in perms]
        return QuantumState.mixture(shape, parts)
    if variant == "spin1_pair":
        if shape.j.twice != 2 or shape.N != 2:
            raise ValueError("spin1_pair singlet requires j = 1 and N = 2")
        psi = np.zeros(9, dtype=complex)
        # basis index = 3*(1 - m1) + (1 - m2)
        psi[2] = 1.0  # |1,-1>
        psi[4] = -1.0  # |0,0>
        psi[6] = 1.0  # |-1,1>
        return QuantumState(shape, psi / math.sqrt(3.0))
    proj = singlet_subspace_projector(shape)
    return QuantumState(shape, proj / np.trace(proj).real)


def thermal_state(H: np.ndarray, T: float, shape: EnsembleShape) -> QuantumState:
    """Gibbs state exp(-H/T)/Z, exponent shifted by the ground energy."""
    if T <= 0:
        raise ValueError(f"temperature must be positive, got {T}")
    H = np.asarray(H, dtype=complex)
    if np.max(np.abs(H - H.conj().T)) > 1e-9:
        raise ValueError("Hamiltonian must be Hermitian")
    w, v = np.linalg.eigh(H)
    weights = np.exp(-(w - w[0]) / T)
    rho = (v * weights) @ v.conj().T
    return QuantumState(shape, rho / np.trace(rho).real)


def ground_state(H: np.ndarray, shape: EnsembleShape, degeneracy_tol: float = 1e-9) -> QuantumState:
    """Uniform mixture over the ground eigenspace of H."""
    H = np.asarray(H, dtype=complex)
    w, v = np.linalg.eigh(H)
    sel = w < w[0] + degeneracy_tol
    dim = int(np.count_nonzero(sel))
    return QuantumState.mixture(
        shape, [(1.0 / dim, v[:, i]) for i in range(dim)]
    )


def mix_with_white_noise(state: QuantumState, p_noise: float) -> QuantumState:
    """(1 - p) rho + p * identity / D."""
    if not 0.0 <= p_noise <= 1.0:
        raise ValueError(f"noise fraction must lie in [0, 1], got {p_noise}")
    if p_noise == 0.0:
        return state
    D = state.shape.D
    rho = (1.0 - p_noise) * state.rho() + p_noise * np.eye(D) / D
    return QuantumState(state.shape, rho)


def rotated_average(state: QuantumState, axis, steps: int = 64) -> QuantumState:
    """Uniform discrete average of the state over rotations about `axis`.

    Exact replacement of the continuous angle average once steps > 4Nj, the
    moment functions being band-limited in the rotation angle.
    """
    if steps < 2:
        raise ValueError("rotation averaging needs at least 2 steps")
    shape = state.shape
    if state.kind != "mixed" and shape.D > 2048:
        # keep large product states unmaterialized
        parts = []
        for k in range(steps):
            angle = 2.0 * math.pi * k / steps
            rot = rotate_state(state, axis, angle)
            parts.extend((w / steps, v) for w, v in rot.pure_parts())
        return QuantumState.mixture(shape, parts)
    gen = collective_operator(shape, axis)
    w, v = np.linalg.eigh(gen)
    rho0 = v.conj().T @ state.rho() @ v
    acc = np.zeros_like(rho0)
    for k in range(steps):
        phase = np.exp(-1j * (2.0 * np.pi * k / steps) * w)
        acc += (phase[:, None] * rho0) * phase.conj()[None, :]
    rho = v @ (acc / steps) @ v.conj().T
    return QuantumState(shape, 0.5 * (rho + rho.conj().T))


# ---------------------------------------------------------------------------
# extremal separable states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremalSpec:
    """Target mean spin for the separable states sitting at the vertices of
    the moment polytope."""

    shape: EnsembleShape
    jvec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.jvec, dtype=float).copy()
        if v.shape != (3,):
            raise ValueError("mean spin must be a 3-vector")
        if np.linalg.norm(v) > self.shape.Nj + 1e-9:
            raise ValueError(f"|mean spin| = {np.linalg.norm(v)} exceeds Nj = {self.shape.Nj}")
        v.flags.writeable = False
        object.__setattr__(self, "jvec", v)

    @property
    def kappa(self) -> float:
        return (self.shape.N - 1) / self.shape.N

    def branch(self, axis: int):
        """(c, p, bloch+, bloch-) for the vertex family on the given axis.

        c is the axis component of the two single-particle Bloch directions
        and p the mixing weight reproducing the target mean spin.
        """
        J = self.shape.Nj
        perp = [l for l in range(3) if l != axis]
        perp_sq = sum(self.jvec[l] ** 2 for l in perp)
        c = math.sqrt(max(0.0, 1.0 - perp_sq / J**2))
        if c < 1e-12:
            if abs(self.jvec[axis]) > 1e-9:
                raise ValueError("mean spin saturates the transverse bound; axis component must vanish")
            p = 0.5
        else:
            p = 0.5 * (1.0 + self.jvec[axis] / (J * c))
        p = min(1.0, max(0.0, p))
        plus = np.zeros(3)
        minus = np.zeros(3)
        for l in perp:
            plus[l] = minus[l] = self.jvec[l] / J
        plus[axis] = c
        minus[axis] = -c
        return c, p, plus, minus


EXTREMAL_KINDS = tuple(
    f"{family}_{ax}" for family in ("A", "B", "Bprime") for ax in ("x", "y", "z")
)


def extremal_state(spec: ExtremalSpec, which: str, guard: int | None = None) -> QuantumState:
    """Separable state realizing a vertex of the moment polytope.

    A_k: mixture of the two fully aligned coherent products. B_k: coherent
    product split between the two Bloch directions (requires integer N*p).
    Bprime_k: the nearest separable approximation when N*p is fractional.
    """
    if which not in EXTREMAL_KINDS:
        raise ValueError(f"unknown extremal state {which!r}; options: {EXTREMAL_KINDS}")
    family, ax = which.rsplit("_", 1)
    axis = "xyz".index(ax)
    shape = spec.shape.check_guard(guard)
    _, p, plus, minus = spec.branch(axis)
    psi_plus = spin_coherent_state(shape.j, plus)
    psi_minus = spin_coherent_state(shape.j, minus)

    def product(n_plus: int) -> np.ndarray:
        factors = [psi_plus] * n_plus + [psi_minus] * (shape.N - n_plus)
        return reduce(np.kron, factors)

    if family == "A":
        return QuantumState.mixture(
            shape, [(p, product(shape.N)), (1.0 - p, product(0))]
        )

    M = shape.N * p
    if family == "B":
        if abs(M - round(M)) > 1e-9:
            raise ValueError(
                f"B_{ax} needs integer N*p, got N*p = {M}; request Bprime_{ax} instead"
            )
        return QuantumState(shape, product(int(round(M))))

    # Bprime: split the fractional part between floor(M) and floor(M)+1
    m = int(math.floor(M + 1e-12))
    eps = M - m
    if eps < 1e-12 or m == shape.N:
        return QuantumState(shape, product(m))
    return QuantumState.mixture(shape, [(1.0 - eps, product(m)), (eps, product(m + 1))])


# ---------------------------------------------------------------------------
# serialization and the named-state mini-language
# ---------------------------------------------------------------------------


def state_to_json(state: QuantumState) -> dict:
    if state.kind == "ensemble":
        return state_to_json(QuantumState(state.shape, state.rho()))
    data = state.data.ravel()
    return {
        "shape": {"N": state.shape.N, "two_j": state.shape.j.twice},
        "kind": "pure" if state.is_pure else "mixed",
        "data": [[float(z.real), float(z.imag)] for z in data],
    }


def state_from_json(obj: dict, guard: int | None = None) -> QuantumState:
    shape = EnsembleShape.make(obj["shape"]["N"], HalfInt(obj["shape"]["two_j"]), guard)
    flat = np.array([complex(re, im) for re, im in obj["data"]])
    if obj["kind"] == "pure":
        return QuantumState(shape, flat)
    if obj["kind"] == "mixed":
        return QuantumState(shape, flat.reshape(shape.D, shape.D))
    raise ValueError(f"unknown state kind {obj['kind']!r}")


def _parse_kv(body: str) -> dict:
    out = {}
    if not body:
        return out
    # comma-separated vectors allowed: dir=0,0,1 consumes values until the next key
    key = None
    for part in body.split(","):
        if "=" in part:
            key, val = part.split("=", 1)
            out[key.strip()] = [val.strip()]
        elif key is not None:
            out[key].append(part.strip())
        else:
            raise ValueError(f"malformed state parameters: {body!r}")
    return {k: v[0] if len(v) == 1 else v for k, v in out.items()}


def from_spec(spec: str, guard: int | None = None) -> QuantumState:
    """Build a named state from a 'name:key=val,...' string.

    Names: coherent (j, N, dir=x,y,z), dicke (j, N, mz), singlet (j, N
    [, variant]), mixed (j, N), alpha (N, alpha), ground (H=bes|h5, j, N),
    thermal (H=bes|h5, j, N, T). An optional noise=p mixes in white noise.
    """
    name, _, body = spec.partition(":")
    name = name.strip().lower()
    kv = _parse_kv(body)
    noise = float(kv.pop("noise", 0.0))

    def shape_of():
        j = kv.pop("j", None)
        n = kv.pop("N", kv.pop("n", None))
        if j is None or n is None:
            raise ValueError(f"state {name!r} needs j= and N= parameters")
        return EnsembleShape.make(int(n), HalfInt.of(j), guard)

    if name == "coherent":
        direction = np.asarray([float(x) for x in kv.pop("dir", ["0", "0", "1"])], dtype=float)
        norm = np.linalg.norm(direction)
        if norm < 1e-12:
            raise ValueError("coherent direction must be nonzero")
        state = coherent_ensemble(shape_of(), direction / norm, guard)
    elif name == "dicke":
        mz = HalfInt.of(kv.pop("mz", 0))
        state = dicke_state(shape_of(), mz, guard)
    elif name == "singlet":
        variant = kv.pop("variant", "projector")
        state = singlet_state(shape_of(), variant, guard)
    elif name == "mixed":
        state = completely_mixed(shape_of(), guard)
    elif name == "alpha":
        alpha = float(kv.pop("alpha", 0.75))
        n = int(kv.pop("N", kv.pop("n", 1)))
        kv.pop("j", None)
        state = alpha_product_state(n, alpha, guard)
    elif name in ("ground", "thermal"):
        from .pipeline import named_hamiltonian  # deferred: avoids an import cycle

        hname = kv.pop("H", kv.pop("h", "bes"))
        shape = shape_of()
        H = named_hamiltonian(hname, shape)
        if name == "ground":
            state = ground_state(H, shape)
        else:
            state = thermal_state(H, float(kv.pop("T", kv.pop("t", 1.0))), shape)
    else:
        raise ValueError(f"unknown state name {name!r}")
    if kv:
        raise ValueError(f"unused parameters for state {name!r}: {sorted(kv)}")
    if noise:
        state = mix_with_white_noise(state, noise)
    return state


def load_state(source: str, guard: int | None = None) -> QuantumState:
    """Load a state from a spec string, or from a JSON file via '@path'."""
    if source.startswith("@"):
        with open(source[1:], encoding="utf-8") as fh:
            return state_from_json(json.load(fh), guard)
    return from_spec(source, guard)
