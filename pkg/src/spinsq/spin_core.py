"""Single-particle spin-j algebra: operators, rotations, coherent states,
Bloch vectors and the nematic (quadrupole) tensor."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

# structural matrix identities
STRUCT_TOL = 1e-12
# statistical / derived quantities
DERIVED_TOL = 1e-10

AXES = ("x", "y", "z")


@dataclass(frozen=True, order=True)
class HalfInt:
    """Exact half-integer, stored as twice its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)):
            raise TypeError(f"twice must be an integer, got {self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Coerce an int, float, Fraction, 'p/q' string or HalfInt to HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(2 * int(value))
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, Fraction):
            twice = 2 * value
            if twice.denominator != 1:
                raise ValueError(f"{value} is not a half-integer")
            return cls(int(twice))
        if isinstance(value, (float, np.floating)):
            twice = 2.0 * float(value)
            if abs(twice - round(twice)) > 1e-9:
                raise ValueError(f"{value} is not a half-integer")
            return cls(int(round(twice)))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def _as_spin(j) -> HalfInt:
    j = HalfInt.of(j)
    if j.twice < 1:
        raise ValueError(f"spin quantum number must be >= 1/2, got {j}")
    return j


@dataclass(frozen=True)
class SpinOperators:
    """Angular momentum matrices for one spin-j particle, jz diagonal with
    eigenvalues j, j-1, ..., -j (descending)."""

    j: HalfInt
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def d(self) -> int:
        return self.j.twice + 1

    @property
    def triple(self):
        return (self.jx, self.jy, self.jz)

    def along(self, direction) -> np.ndarray:
        """Component of the spin along a (not necessarily unit) 3-vector."""
        n = np.asarray(direction, dtype=float)
        return n[0] * self.jx + n[1] * self.jy + n[2] * self.jz


@lru_cache(maxsize=None)
def _spin_operators_cached(twice_j: int) -> SpinOperators:
    j = twice_j / 2.0
    d = twice_j + 1
    m = j - np.arange(d)
    jz = np.diag(m.astype(complex))
    jp = np.zeros((d, d), dtype=complex)
    # ladder: j+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>, descending basis
    for i in range(1, d):
        jp[i - 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    jm = jp.conj().T
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    for a in (jx, jy, jz):
        a.flags.writeable = False
    return SpinOperators(HalfInt(twice_j), jx, jy, jz)


def spin_operators(j) -> SpinOperators:
    """Spin-j matrices in the descending-jz basis."""
    return _spin_operators_cached(_as_spin(j).twice)


def expectation(op: np.ndarray, state: np.ndarray) -> float:
    """Real expectation value of a Hermitian operator on a ket or density matrix."""
    state = np.asarray(state)
    if state.ndim == 1:
        return float(np.real(np.vdot(state, op @ state)))
    return float(np.real(np.sum(op.T * state)))


def rotation_unitary(j, axis, angle: float) -> np.ndarray:
    """exp(-i*angle*j_axis), by Hermitian eigendecomposition of the generator."""
    ops = spin_operators(j)
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise ValueError("rotation axis must be nonzero")
    gen = ops.along(n / norm)
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


def rotation_taking_z_to(direction):
    """Axis and angle of the rotation carrying +z onto the given unit vector."""
    n = np.asarray(direction, dtype=float)
    nz = min(1.0, max(-1.0, n[2]))
    angle = np.arccos(nz)
    axis = np.cross([0.0, 0.0, 1.0], n)
    if np.linalg.norm(axis) < 1e-12:
        axis = np.array([0.0, 1.0, 0.0])  # +z or -z: rotate about y
    else:
        axis = axis / np.linalg.norm(axis)
    return axis, angle


def spin_coherent_state(j, direction) -> np.ndarray:
    """Spin coherent state with <j_vec> = j * direction, from the rotated
    highest-weight jz eigenstate."""
    n = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > DERIVED_TOL:
        raise ValueError(f"direction must be a unit vector, |n| = {np.linalg.norm(n)}")
    j = _as_spin(j)
    d = j.twice + 1
    psi = np.zeros(d, dtype=complex)
    psi[0] = 1.0
    axis, angle = rotation_taking_z_to(n)
    if angle > 1e-14:
        psi = rotation_unitary(j, axis, angle) @ psi
    return psi


def bloch_vector(state: np.ndarray, j) -> np.ndarray:
    """Normalized mean spin r_l = <j_l>/j of a single-particle state."""
    ops = spin_operators(j)
    jj = ops.j.value
    return np.array([expectation(o, state) / jj for o in ops.triple])


def nematic_q0(j) -> float:
    """Isotropic local second moment j(j+1)/3."""
    j = HalfInt.of(j)
    return float(j.as_fraction * (j.as_fraction + 1) / 3)


def nematic_tensor(rho_av1: np.ndarray, j) -> np.ndarray:
    """Traceless symmetric tensor of local second moments,
    Q_kl = <(j_k j_l + j_l j_k)/2> - delta_kl * j(j+1)/3."""
    ops = spin_operators(j)
    q0 = nematic_q0(j)
    q = np.empty((3, 3))
    for k in range(3):
        for l in range(k, 3):
            sym = 0.5 * (ops.triple[k] @ ops.triple[l] + ops.triple[l] @ ops.triple[k])
            q[k, l] = q[l, k] = expectation(sym, rho_av1)
    return q - q0 * np.eye(3)


def _check_density_matrix(rho: np.ndarray):
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-9:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh(rho)[0] < -1e-9:
        raise ValueError("density matrix must be positive semidefinite")
    return rho


def _check_orthonormal_axes(*axes):
    arr = np.asarray(axes, dtype=float)
    if np.max(np.abs(arr @ arr.T - np.eye(len(axes)))) > 1e-9:
        raise ValueError("axes must be mutually orthonormal")
    return arr


@dataclass(frozen=True)
class SingleParticleReport:
    """Bloch vector, nematic tensor and the average single-particle
    squeezing parameter (None when its denominator vanishes)."""

    bloch: np.ndarray
    nematic: np.ndarray
    q0: float
    xi_sj_av1: float | None


def single_particle_report(rho_av1: np.ndarray, axis, perp1, perp2, j=None) -> SingleParticleReport:
    """Single-particle squeezing data of an average one-body state.

    xi_sj_av1 = 2j (Delta j_n)^2 / (<j_p1>^2 + <j_p2>^2) with n the squeezing
    axis and p1, p2 the two orthogonal axes; reported as None when the
    denominator is zero.
    """
    rho = _check_density_matrix(rho_av1)
    if j is None:
        j = HalfInt(rho.shape[0] - 1)
    ops = spin_operators(j)
    if ops.d != rho.shape[0]:
        raise ValueError(f"state dimension {rho.shape[0]} does not match spin {j}")
    n, p1, p2 = _check_orthonormal_axes(axis, perp1, perp2)

    jn = ops.along(n)
    var_n = expectation(jn @ jn, rho) - expectation(jn, rho) ** 2
    denom = expectation(ops.along(p1), rho) ** 2 + expectation(ops.along(p2), rho) ** 2
    xi = None
    if denom > 1e-12:
        xi = 2.0 * ops.j.value * var_n / denom
    return SingleParticleReport(
        bloch=bloch_vector(rho, j),
        nematic=nematic_tensor(rho, j),
        q0=nematic_q0(j),
        xi_sj_av1=xi,
    )
