"""Entanglement criteria on collective moments: the complete four-family set,
its unified subset form, coordinate-free matrix form, spin-squeezing
parameters, mapped qubit criteria, two-body form and PPT checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .moments import (
    MomentMatrices,
    MomentSet,
    ReducedStates,
    dicke_local_second_moment,
)
from .spin_core import AXES, HalfInt, nematic_q0
from .states import EnsembleShape, QuantumState

# strict negativity: boundary (saturating) states are never flagged
VIOLATION_TOL = 1e-12

# axis permutations (k, l, m); the family records carry the distinguished axis
_PERMS = {"x": (0, 1, 2), "y": (1, 2, 0), "z": (2, 0, 1)}

SUBSET_NAMES = ("none", "x", "y", "z", "xy", "xz", "yz", "xyz")


@dataclass(frozen=True)
class IndexSubset:
    """Subset of the axis labels {x, y, z}."""

    members: tuple[str, ...]

    @classmethod
    def of(cls, spec) -> "IndexSubset":
        if isinstance(spec, IndexSubset):
            return spec
        if isinstance(spec, str):
            spec = () if spec in ("", "none") else tuple(spec)
        members = tuple(sorted(set(spec), key=AXES.index))
        if any(m not in AXES for m in members):
            raise ValueError(f"subset members must be axis labels, got {spec!r}")
        return cls(members)

    @property
    def name(self) -> str:
        return "".join(self.members) or "none"

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(AXES.index(m) for m in self.members)


ALL_SUBSETS = tuple(IndexSubset.of(s) for s in SUBSET_NAMES)


@dataclass(frozen=True)
class CriterionRecord:
    """One separability condition, normalized to lhs >= rhs."""

    name: str
    axes: tuple | None
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def violated(self) -> bool:
        return self.margin < -VIOLATION_TOL

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "axes": None if self.axes is None else list(self.axes),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "margin": float(self.margin),
            "violated": self.violated,
        }


@dataclass(frozen=True)
class CriteriaReport:
    records: tuple[CriterionRecord, ...]

    @property
    def entangled(self) -> bool:
        return any(r.violated for r in self.records)

    def __getitem__(self, name: str) -> CriterionRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.records)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "entangled": self.entangled,
            "records": [r.to_json() for r in self.records],
        }


def _rec(name, axes, lhs, rhs) -> CriterionRecord:
    return CriterionRecord(name, axes, float(lhs), float(rhs))


def subset_record(m: MomentSet, subset: IndexSubset) -> CriterionRecord:
    """Unified separability condition for one axis subset:
    (N-1) * sum_{l in I} mod_var_l + N(N-1) j^2 >= sum_{l not in I} mod_second_l."""
    N = m.shape.N
    jsq = m.shape.j.value ** 2
    inside = subset.indices
    outside = [i for i in range(3) if i not in inside]
    lhs = (N - 1) * sum(m.mod_var[i] for i in inside) + N * (N - 1) * jsq
    rhs = sum(m.mod_second[i] for i in outside)
    return _rec(f"subset_{subset.name}", subset.members, lhs, rhs)


def evaluate_optimal_set(m: MomentSet) -> CriteriaReport:
    """All eight conditions of the complete moment-based set plus the eight
    unified subset records; the two computations are cross-checked."""
    N = m.shape.N
    j = m.shape.j.value
    nj = m.shape.Nj
    jsq = j * j
    records = [
        _rec("three_moments", None, nj * (nj + 1.0), float(np.sum(m.second))),
        _rec("three_variances", None, float(np.sum(m.var)), nj),
    ]
    for ax, (k, l, mm_) in _PERMS.items():
        lhs = (N - 1) * m.mod_var[k] + N * (N - 1) * jsq
        rhs = m.mod_second[l] + m.mod_second[mm_]
        records.append(_rec(f"one_variance_{ax}", (AXES[k], AXES[l], AXES[mm_]), lhs, rhs))
    for ax, (mm_, k, l) in _PERMS.items():
        lhs = (N - 1) * (m.mod_var[k] + m.mod_var[l]) + N * (N - 1) * jsq
        rhs = m.mod_second[mm_]
        records.append(_rec(f"two_variances_{ax}", (AXES[k], AXES[l], AXES[mm_]), lhs, rhs))

    subset_records = [subset_record(m, s) for s in ALL_SUBSETS]
    _check_subset_consistency(m, records, subset_records)
    return CriteriaReport(tuple(records + subset_records))


def _check_subset_consistency(m: MomentSet, family, subsets):
    """The unified subset form must reproduce the four families.

    For estimated (not exactly physical) inputs the local second moments may
    not sum to N j(j+1); that residual enters the two relations below exactly.
    """
    N = m.shape.N
    j = m.shape.j.value
    residual = N * j * (j + 1) - float(np.sum(m.local_second))
    by_name = {r.name: r for r in family + subsets}
    scale = max(1.0, *(abs(r.lhs) + abs(r.rhs) for r in family))
    tol = 1e-10 * scale
    pairs = [
        (by_name["subset_none"].margin, by_name["three_moments"].margin - residual),
        (
            by_name["subset_xyz"].margin,
            (N - 1) * (by_name["three_variances"].margin + residual),
        ),
    ]
    for ax in AXES:
        pairs.append((by_name[f"subset_{ax}"].margin, by_name[f"one_variance_{ax}"].margin))
    pairs.append((by_name["subset_xy"].margin, by_name["two_variances_z"].margin))
    pairs.append((by_name["subset_xz"].margin, by_name["two_variances_y"].margin))
    pairs.append((by_name["subset_yz"].margin, by_name["two_variances_x"].margin))
    for a, b in pairs:
        if abs(a - b) > tol:
            raise AssertionError(f"subset form disagrees with family form: {a} vs {b}")


def evaluate_coordinate_free(mm: MomentMatrices, shape: EnsembleShape | None = None) -> CriteriaReport:
    """Frame-independent form: traces of the correlation and covariance
    matrices plus the extreme eigenvalues of the combined matrix."""
    shape = shape or mm.shape
    N = shape.N
    j = shape.j.value
    nj = shape.Nj
    q0 = mm.q0
    tr_c = float(np.trace(mm.corr))
    tr_g = float(np.trace(mm.cov))
    eig = np.linalg.eigvalsh(0.5 * (mm.xmat + mm.xmat.T))
    records = (
        _rec("three_moments", None, nj * (nj + 1.0), tr_c),
        _rec("three_variances", None, tr_g, nj),
        _rec("one_variance", None, eig[0], tr_c - nj * (nj + 1.0) + N**2 * q0),
        _rec("two_variances", None, (N - 1) * tr_g - N * (N - 1) * j + N**2 * q0, eig[-1]),
    )
    return CriteriaReport(records)


# ---------------------------------------------------------------------------
# squeezing parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SqueezingReport:
    """The five squeezing parameters; a parameter is None when its
    denominator is not positive, with the reason recorded in `notes`."""

    axes: tuple[str, str, str]
    xi_s2: float | None
    xi_sj2: float | None
    xi_os2: float | None
    xi_singlet2: float
    xi_planar2: float | None
    notes: dict

    def to_json(self) -> dict:
        def val(x):
            return None if x is None else float(x)

        return {
            "schema": 1,
            "axes": list(self.axes),
            "xi_s2": val(self.xi_s2),
            "xi_sj2": val(self.xi_sj2),
            "xi_os2": val(self.xi_os2),
            "xi_singlet2": float(self.xi_singlet2),
            "xi_planar2": val(self.xi_planar2),
            "notes": dict(self.notes),
        }


def squeezing_parameters(m: MomentSet, axes=("x", "y", "z")) -> SqueezingReport:
    """Squeezing parameters for the permutation (k, l, m): k is the squeezed
    axis; for the planar parameter (k, l) is the squeezed plane."""
    k, l, mm_ = (AXES.index(a) for a in axes)
    N = m.shape.N
    j = m.shape.j.value
    njsq = N * j * j
    notes = {}

    mean_sq = m.jvec[l] ** 2 + m.jvec[mm_] ** 2
    if mean_sq > 0.0:
        xi_s2 = N * m.var[k] / mean_sq
        xi_sj2 = N * (m.mod_var[k] + njsq) / mean_sq
    else:
        xi_s2 = xi_sj2 = None
        notes["xi_s2"] = notes["xi_sj2"] = "zero transverse mean spin"

    mod_sq = m.mod_second[l] + m.mod_second[mm_]
    if mod_sq > 0.0:
        xi_os2 = (N - 1) * (m.mod_var[k] + njsq) / mod_sq
    else:
        xi_os2 = None
        notes["xi_os2"] = "non-positive modified-moment denominator"

    xi_singlet2 = float(np.sum(m.var)) / m.shape.Nj

    if m.mod_second[mm_] > 0.0:
        xi_planar2 = (N - 1) * (m.mod_var[k] + m.mod_var[l] + njsq) / m.mod_second[mm_]
    else:
        xi_planar2 = None
        notes["xi_planar2"] = "non-positive modified-moment denominator"

    return SqueezingReport(tuple(axes), xi_s2, xi_sj2, xi_os2, xi_singlet2, xi_planar2, notes)


# ---------------------------------------------------------------------------
# qubit criteria mapped to higher spin
# ---------------------------------------------------------------------------


def map_to_qubit_moments(m: MomentSet):
    """Scaled first and modified second moments: <J_l>/(2j), <Jt_l^2>/(4j^2).

    For separable states these ranges are independent of j, so any qubit
    separability condition on them transfers to spin j.
    """
    j = m.shape.j.value
    return m.jvec / (2.0 * j), m.mod_second / (4.0 * j * j)


PLANAR_CONSTANTS = {1: 0.25, 2: 7.0 / 16.0}  # keyed by 2j; larger j only known numerically


def planar_constant(j) -> float:
    j = HalfInt.of(j)
    try:
        return PLANAR_CONSTANTS[j.twice]
    except KeyError:
        raise ValueError(
            f"planar-squeezing constant for j = {j} is only known numerically"
        ) from None


def planar_criterion(m: MomentSet, plane=("x", "y")) -> CriterionRecord:
    """Literature planar-squeezing condition var_k + var_l >= N*C_j."""
    c = planar_constant(m.shape.j)
    k, l = (AXES.index(a) for a in plane)
    return _rec(f"planar_{plane[0]}{plane[1]}", tuple(plane), m.var[k] + m.var[l], m.shape.N * c)


def mapped_criteria(m: MomentSet, qubit_condition=None) -> CriteriaReport:
    """Criteria obtained from qubit conditions by the moment rescaling:
    a pairwise condition per distinguished axis, the mapped planar condition
    per plane, the literature planar condition where its constant is known,
    and optionally a caller-supplied qubit condition."""
    N = m.shape.N
    j = m.shape.j.value
    jsq = j * j
    records = []
    for ax, (n, l, k) in _PERMS.items():
        root = np.hypot(
            m.mod_second[l] + m.mod_second[k], 2.0 * (N - 1) * j * m.jvec[n]
        )
        records.append(
            _rec(f"pairwise_mapped_{ax}", (AXES[n],), N * (N - 1) * jsq, root - m.mod_second[n])
        )
    for pk, pl in (("x", "y"), ("y", "z"), ("z", "x")):
        k, l = AXES.index(pk), AXES.index(pl)
        records.append(
            _rec(f"mapped_planar_{pk}{pl}", (pk, pl), m.mod_var[k] + m.mod_var[l], -N * jsq)
        )
    if m.shape.j.twice <= 2:
        for pk, pl in (("x", "y"), ("y", "z"), ("z", "x")):
            records.append(planar_criterion(m, (pk, pl)))
    if qubit_condition is not None:
        jv, kt = map_to_qubit_moments(m)
        lhs, rhs = qubit_condition(jv, kt, N)
        name = getattr(qubit_condition, "__name__", "custom")
        records.append(_rec(f"mapped_{name}", None, lhs, rhs))
    return CriteriaReport(tuple(records))


# ---------------------------------------------------------------------------
# two-body form and PPT
# ---------------------------------------------------------------------------


def two_body_criterion(r: ReducedStates, shape: EnsembleShape | None = None, subset="xyz") -> CriterionRecord:
    """Separability condition on the average two-body state:
    N * sum_{l in I} (<j_l x j_l> - <j_l x 1>^2) >= Sigma - j^2."""
    shape = shape or r.shape
    if shape.N < 2:
        raise ValueError("the two-body form needs at least two particles")
    subset = IndexSubset.of(subset)
    j = shape.j.value
    lhs = shape.N * sum(r.pair_corr[i] - r.pair_mean[i] ** 2 for i in subset.indices)
    return _rec(f"pair_reduced_{subset.name}", subset.members, lhs, r.sigma - j * j)


def partial_transpose(rho: np.ndarray, sites, d: int, N: int) -> np.ndarray:
    """Transpose the tensor factors of the given sites."""
    t = rho.reshape([d] * (2 * N))
    axes = list(range(2 * N))
    for s in sites:
        axes[s], axes[N + s] = axes[N + s], axes[s]
    return np.ascontiguousarray(t.transpose(axes)).reshape(d**N, d**N)


NPT_TOL = 1e-9


@dataclass(frozen=True)
class PPTCutRecord:
    sites: tuple[int, ...]
    min_eigenvalue: float
    npt: bool

    def to_json(self) -> dict:
        return {
            "sites": list(self.sites),
            "min_eigenvalue": float(self.min_eigenvalue),
            "npt": self.npt,
        }


@dataclass(frozen=True)
class PPTReport:
    cuts: tuple[PPTCutRecord, ...]
    witness_min: float | None = None  # most negative sampled <A x A> - <A x 1>^2
    witness_samples: int = 0

    @property
    def any_npt(self) -> bool:
        return any(c.npt for c in self.cuts)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "any_npt": self.any_npt,
            "cuts": [c.to_json() for c in self.cuts],
            "witness_min": None if self.witness_min is None else float(self.witness_min),
            "witness_samples": self.witness_samples,
        }


def _default_bipartitions(N: int, singles_only: bool):
    if singles_only or N == 2:
        return [(n,) for n in range(N)]
    # all inequivalent cuts: proper subsets not containing site 0
    cuts = []
    for mask in range(1, 2**N - 1):
        if mask & 1:
            continue
        cuts.append(tuple(n for n in range(N) if mask >> n & 1))
    return cuts


def ppt_report(
    state: QuantumState | None = None,
    bipartitions=None,
    rho_av2: np.ndarray | None = None,
    samples: int = 0,
    rng: np.random.Generator | None = None,
) -> PPTReport:
    """Partial-transpose spectra for ensemble bipartitions, or for an average
    two-body state.

    For `rho_av2` the partial-transpose eigentest is the decisive check; in
    addition `samples` random Hermitian A probe <A x A> - <A x 1>^2, whose
    nonnegativity characterizes PPT on the symmetric subspace. The most
    negative sampled value is reported.
    """
    if (state is None) == (rho_av2 is None):
        raise ValueError("pass exactly one of state or rho_av2")
    cuts = []
    if state is not None:
        d, N = state.shape.d, state.shape.N
        rho = state.rho()
        if bipartitions is None or bipartitions == "all":
            parts = _default_bipartitions(N, singles_only=False)
        elif bipartitions == "singles":
            parts = _default_bipartitions(N, singles_only=True)
        else:
            parts = [tuple(p) for p in bipartitions]
        for sites in parts:
            if not sites or not all(0 <= s < N for s in sites) or len(set(sites)) != len(sites):
                raise ValueError(f"invalid bipartition {sites!r} for N = {N}")
            ev_min = float(np.linalg.eigvalsh(partial_transpose(rho, sites, d, N))[0])
            cuts.append(PPTCutRecord(tuple(sites), ev_min, ev_min < -NPT_TOL))
        return PPTReport(tuple(cuts))

    dd = rho_av2.shape[0]
    d = int(round(np.sqrt(dd)))
    if d * d != dd:
        raise ValueError("rho_av2 must act on a two-body space")
    ev_min = float(np.linalg.eigvalsh(partial_transpose(rho_av2, (1,), d, 2))[0])
    cuts.append(PPTCutRecord((1,), ev_min, ev_min < -NPT_TOL))
    witness_min = None
    if samples:
        rng = rng or np.random.default_rng(0)
        eye = np.eye(d)
        values = []
        for _ in range(samples):
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            a = 0.5 * (g + g.conj().T)
            aa = float(np.real(np.sum(np.kron(a, a).T * rho_av2)))
            a1 = float(np.real(np.sum(np.kron(a, eye).T * rho_av2)))
            values.append(aa - a1 * a1)
        witness_min = float(min(values))
    return PPTReport(tuple(cuts), witness_min, samples)


# ---------------------------------------------------------------------------
# Dicke local moment and frame scans
# ---------------------------------------------------------------------------


def dicke_local_moment(N: int, j, lambda_z) -> float:
    """Closed form of sum_n <(j_z^(n))^2> on the Dicke state |Nj, lambda_z>."""
    return float(dicke_local_second_moment(N, j, lambda_z))


def frame_scan_margins(shape: EnsembleShape, jvec, corr, nematic, frames) -> dict:
    """Vectorized one-variance / two-variance margins over many frames.

    `frames` has shape (F, 3, 3) with orthonormal rows; returns margin arrays
    of shape (F, 3) keyed by family name (the two trace conditions are frame
    independent and not scanned).
    """
    N = shape.N
    jsq = shape.j.value ** 2
    q0 = nematic_q0(shape.j)
    f = np.asarray(frames, dtype=float)
    j_f = np.einsum("fik,k->fi", f, jvec)
    k_f = np.einsum("fik,kl,fil->fi", f, corr, f)
    m_f = N * (np.einsum("fik,kl,fil->fi", f, nematic, f) + q0)
    kt = k_f - m_f
    vart = kt - j_f**2
    kt_sum = kt.sum(axis=1, keepdims=True)
    vart_sum = vart.sum(axis=1, keepdims=True)
    one_var = (N - 1) * vart + N * (N - 1) * jsq - (kt_sum - kt)
    two_var = (N - 1) * (vart_sum - vart) + N * (N - 1) * jsq - kt
    return {"one_variance": one_var, "two_variances": two_var}
