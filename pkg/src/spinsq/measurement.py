"""Population-measurement protocol: rotate, read out local z projections,
and build moment estimators with finite statistics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .moments import MomentSet
from .spin_core import AXES
from .states import EnsembleShape, QuantumState, rotate_state

_AXIS_VECTORS = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}


def _axis_vector(axis) -> np.ndarray:
    if isinstance(axis, str):
        try:
            return _AXIS_VECTORS[axis]
        except KeyError:
            raise ValueError(f"unknown axis {axis!r}") from None
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or np.linalg.norm(n) < 1e-12:
        raise ValueError("axis must be x, y, z or a nonzero 3-vector")
    return n / np.linalg.norm(n)


@dataclass(frozen=True)
class MeasurementRecord:
    """Per-shot populations of the local z-eigenstates after rotating the
    measurement axis onto z. counts[s, i] is the number of particles found
    with projection chi[i] in shot s; each row sums to N."""

    shape: EnsembleShape
    axis: str
    chi: np.ndarray  # outcome values -j .. +j, ascending
    counts: np.ndarray  # (shots, d) integers
    seed: int

    @property
    def shots(self) -> int:
        return self.counts.shape[0]

    def total_projection(self) -> np.ndarray:
        """Per-shot collective projection sum_chi N_chi * chi."""
        return self.counts @ self.chi

    def local_second_moment(self) -> np.ndarray:
        """Per-shot population estimator sum_chi N_chi * chi^2."""
        return self.counts @ (self.chi**2)

    def to_csv(self, path=None) -> str | None:
        def fmt(c):
            return f"chi={c:g}"

        header = ["shot"] + [fmt(c) for c in self.chi]
        buf = io.StringIO() if path is None else open(path, "w", newline="", encoding="utf-8")
        try:
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(header)
            for s, row in enumerate(self.counts):
                writer.writerow([s] + [int(c) for c in row])
            if path is None:
                return buf.getvalue()
            return None
        finally:
            buf.close()

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "N": self.shape.N,
            "two_j": self.shape.j.twice,
            "axis": self.axis,
            "shots": int(self.shots),
            "seed": int(self.seed),
            "chi": [float(c) for c in self.chi],
            "mean_counts": [float(v) for v in self.counts.mean(axis=0)],
        }


def _outcome_probabilities(state: QuantumState, axis_vec: np.ndarray) -> np.ndarray:
    """Diagonal of the rotated state in the product local-z basis."""
    n = axis_vec
    rotated = state
    if abs(n[2] - 1.0) >= 1e-12:
        rot_axis = np.cross(n, [0.0, 0.0, 1.0])
        if np.linalg.norm(rot_axis) < 1e-12:
            rot_axis = np.array([0.0, 1.0, 0.0])  # axis = -z
        angle = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
        rotated = rotate_state(state, rot_axis, angle)
    if rotated.kind == "mixed":
        return np.clip(np.real(np.diag(rotated.data)), 0.0, None)
    probs = np.zeros(state.shape.D)
    for w, psi in rotated.pure_parts():
        probs += w * np.abs(psi) ** 2
    return probs


def simulate_population_measurement(
    state: QuantumState, axis="z", shots: int = 1, seed: int = 0, rng=None
) -> MeasurementRecord:
    """Sample the joint local-projection outcome distribution along `axis`.

    Exact sampling from the diagonal of the rotated density matrix in the
    product basis; deterministic for a fixed seed.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    shape = state.shape
    n = _axis_vector(axis)
    probs = _outcome_probabilities(state, n)
    probs = probs / probs.sum()
    gen = rng if rng is not None else np.random.default_rng(seed)
    draws = gen.choice(shape.D, size=shots, p=probs)

    d, N = shape.d, shape.N
    j = shape.j.value
    # decode base-d digits: digit 0 is m = +j, so ascending-chi column is d-1-digit
    digits = np.empty((shots, N), dtype=np.int64)
    rem = draws.copy()
    for site in reversed(range(N)):
        digits[:, site] = rem % d
        rem //= d
    cols = (d - 1) - digits
    counts = np.zeros((shots, d), dtype=np.int64)
    flat = (np.arange(shots)[:, None] * d + cols).ravel()
    np.add.at(counts.ravel(), flat, 1)
    chi = -j + np.arange(d)
    axis_name = axis if isinstance(axis, str) else f"({n[0]:g},{n[1]:g},{n[2]:g})"
    return MeasurementRecord(shape, axis_name, chi, counts, seed if rng is None else -1)


def _mean_and_stderr(values: np.ndarray):
    mean = float(values.mean())
    if values.size < 2:
        return mean, float("nan")
    return mean, float(values.std(ddof=1) / np.sqrt(values.size))


@dataclass(frozen=True)
class EstimatedMoments:
    """Finite-statistics estimates of J, K, M and Kt = K - M per axis, with
    nonparametric standard errors."""

    shape: EnsembleShape
    shots: int
    seed: int
    jvec: np.ndarray
    second: np.ndarray
    local_second: np.ndarray
    mod_second: np.ndarray
    se_jvec: np.ndarray
    se_second: np.ndarray
    se_local_second: np.ndarray
    se_mod_second: np.ndarray

    def as_moment_set(self) -> MomentSet:
        """Plug the estimates into the exact moment-set container."""
        return MomentSet.from_vectors(self.shape, self.jvec, self.second, self.local_second)

    def to_json(self) -> dict:
        out = {"schema": 1, "N": self.shape.N, "two_j": self.shape.j.twice,
               "shots": int(self.shots), "seed": int(self.seed)}
        fields = {
            "J": (self.jvec, self.se_jvec),
            "K": (self.second, self.se_second),
            "M": (self.local_second, self.se_local_second),
            "Kt": (self.mod_second, self.se_mod_second),
        }
        for label, (vals, errs) in fields.items():
            for i, ax in enumerate(AXES):
                out[f"{label}_{ax}"] = float(vals[i])
                out[f"se_{label}_{ax}"] = float(errs[i])
        return out


def estimate_moment_set(state: QuantumState, shots: int, seed: int = 0) -> EstimatedMoments:
    """Estimate all six measured quantities per axis from population
    measurements, one independent sampling stream per axis."""
    if shots < 2:
        raise ValueError("moment estimation needs at least 2 shots")
    streams = np.random.SeedSequence(seed).spawn(3)
    est = {k: np.empty(3) for k in ("j", "k", "m", "kt")}
    err = {k: np.empty(3) for k in ("j", "k", "m", "kt")}
    for i, ax in enumerate(AXES):
        rec = simulate_population_measurement(
            state, ax, shots, seed, rng=np.random.default_rng(streams[i])
        )
        s = rec.total_projection().astype(float)
        m_shot = rec.local_second_moment().astype(float)
        est["j"][i], err["j"][i] = _mean_and_stderr(s)
        est["k"][i], err["k"][i] = _mean_and_stderr(s**2)
        est["m"][i], err["m"][i] = _mean_and_stderr(m_shot)
        est["kt"][i], err["kt"][i] = _mean_and_stderr(s**2 - m_shot)
    return EstimatedMoments(
        shape=state.shape,
        shots=shots,
        seed=seed,
        jvec=est["j"],
        second=est["k"],
        local_second=est["m"],
        mod_second=est["kt"],
        se_jvec=err["j"],
        se_second=err["k"],
        se_local_second=err["m"],
        se_mod_second=err["kt"],
    )
