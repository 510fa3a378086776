"""Threshold scans over noise and temperature, reference-table reproduction,
and named Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import CriteriaReport, evaluate_optimal_set, ppt_report
from .moments import (
    completely_mixed_moments,
    dicke_moments,
    moment_set,
    singlet_moments,
)
from .states import (
    EnsembleShape,
    QuantumState,
    collective_triple,
    completely_mixed,
    dicke_state,
    mix_with_white_noise,
    singlet_state,
)

MAX_BISECTION_ITER = 60


@dataclass(frozen=True)
class ScanResult:
    """Outcome of a verdict bisection: the threshold bracket where the
    selected criterion flips from violated to satisfied."""

    parameter: str
    criterion: str
    lower: float
    upper: float
    threshold: float | None
    tolerance: float
    evaluations: int
    lower_verdict: bool
    upper_verdict: bool

    @property
    def found(self) -> bool:
        return self.threshold is not None

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "parameter": self.parameter,
            "criterion": self.criterion,
            "bracket": [float(self.lower), float(self.upper)],
            "threshold": None if self.threshold is None else float(self.threshold),
            "tolerance": float(self.tolerance),
            "evaluations": int(self.evaluations),
            "lower_verdict": self.lower_verdict,
            "upper_verdict": self.upper_verdict,
        }


def criterion_verdict(report: CriteriaReport, selector: str) -> bool:
    """True when the selected condition is violated. `selector` is a record
    name, a family prefix matching several records, or 'any'."""
    if selector == "any":
        return report.entangled
    names = report.names()
    if selector in names:
        return report[selector].violated
    matches = [r for r in report.records if r.name.startswith(selector)]
    if not matches:
        raise ValueError(f"unknown criterion selector {selector!r}; records: {names}")
    return any(r.violated for r in matches)


def _bisect_verdict(verdict, lo: float, hi: float, tol: float):
    """Shrink [lo, hi] with verdict(lo) True and verdict(hi) False."""
    evaluations = 0
    for _ in range(MAX_BISECTION_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        evaluations += 1
        if verdict(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi, evaluations


def noise_threshold(
    state: QuantumState, criterion: str = "any", tol: float = 1e-6
) -> ScanResult:
    """White-noise fraction at which the selected criterion stops detecting
    the state, located by verdict bisection."""

    def verdict(p: float) -> bool:
        noisy = mix_with_white_noise(state, p)
        return criterion_verdict(evaluate_optimal_set(moment_set(noisy)), criterion)

    v0 = verdict(0.0)
    v1 = verdict(1.0)
    if v0 == v1:
        return ScanResult("p_noise", criterion, 0.0, 1.0, None, tol, 2, v0, v1)
    if not v0:
        raise ValueError(
            f"non-monotone noise bracket: violated at p=1 but not at p=0 "
            f"(verdicts {v0}, {v1})"
        )
    lo, hi, n = _bisect_verdict(verdict, 0.0, 1.0, tol)
    return ScanResult("p_noise", criterion, lo, hi, 0.5 * (lo + hi), tol, n + 2, v0, v1)


def _thermal_family(H: np.ndarray):
    w, v = np.linalg.eigh(np.asarray(H, dtype=complex))

    def rho_at(T: float) -> np.ndarray:
        weights = np.exp(-(w - w[0]) / T)
        rho = (v * weights) @ v.conj().T
        return rho / np.trace(rho).real

    return rho_at


def temperature_thresholds(
    H: np.ndarray, shape: EnsembleShape, t_range=(1.0, 10.0), tol: float = 1e-3
) -> dict:
    """Detection temperatures of the Gibbs family of H: T_s for the
    three-variances condition and T_ppt for negativity under any
    single-site partial transpose."""
    rho_at = _thermal_family(H)
    lo, hi = t_range
    if not 0 < lo < hi:
        raise ValueError(f"temperature range must satisfy 0 < lo < hi, got {t_range}")

    def verdict_s(T: float) -> bool:
        m = moment_set(QuantumState(shape, rho_at(T)))
        return evaluate_optimal_set(m)["three_variances"].violated

    def verdict_ppt(T: float) -> bool:
        rep = ppt_report(QuantumState(shape, rho_at(T)), bipartitions="singles")
        return rep.any_npt

    out = {}
    for key, verdict in (("T_s", verdict_s), ("T_ppt", verdict_ppt)):
        v_lo, v_hi = verdict(lo), verdict(hi)
        if not v_lo or v_hi:
            raise ValueError(
                f"{key} bracket failure on {t_range}: verdicts ({v_lo}, {v_hi}); "
                "the range must straddle the transition"
            )
        a, b, n = _bisect_verdict(verdict, lo, hi, tol)
        out[key] = ScanResult("T", key, a, b, 0.5 * (a + b), tol, n + 2, v_lo, v_hi)
    return out


# ---------------------------------------------------------------------------
# named Hamiltonians and the reference table
# ---------------------------------------------------------------------------


def named_hamiltonian(name: str, shape: EnsembleShape) -> np.ndarray:
    """'bes': total spin squared (its Gibbs family hosts the bound-entangled
    window); 'h5': Jx^2 + Jz^2/4 + 3 Jz/4 (degenerate squeezed ground space)."""
    jx, jy, jz = collective_triple(shape)
    name = name.lower()
    if name == "bes":
        return jx @ jx + jy @ jy + jz @ jz
    if name == "h5":
        return jx @ jx + 0.25 * (jz @ jz) + 0.75 * jz
    raise ValueError(f"unknown Hamiltonian {name!r}; options: bes, h5")


TABLE_STATES = ("singlet", "completely_mixed", "dicke")


def reference_table(shape: EnsembleShape) -> dict:
    """Closed-form J, K, M vectors of the reference states next to the values
    extracted from explicitly constructed states."""
    closed = {
        "singlet": singlet_moments(shape),
        "completely_mixed": completely_mixed_moments(shape),
        "dicke": dicke_moments(shape),
    }
    built = {
        "singlet": singlet_state(shape, "projector"),
        "completely_mixed": completely_mixed(shape),
        "dicke": dicke_state(shape, 0),
    }
    rows = {}
    for name in TABLE_STATES:
        ref = closed[name]
        got = moment_set(built[name])
        err = max(
            float(np.max(np.abs(ref.jvec - got.jvec))),
            float(np.max(np.abs(ref.second - got.second))),
            float(np.max(np.abs(ref.local_second - got.local_second))),
        )
        rows[name] = {
            "J": [float(v) for v in ref.jvec],
            "K": [float(v) for v in ref.second],
            "M": [float(v) for v in ref.local_second],
            "extracted": got.to_json(),
            "max_abs_error": err,
        }
    return {"schema": 1, "N": shape.N, "two_j": shape.j.twice, "rows": rows}
