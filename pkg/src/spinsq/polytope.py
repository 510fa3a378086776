"""Geometry of the separable region in the space of modified second moments:
closed-form vertices, facet margins and mesh export."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import evaluate_optimal_set
from .moments import MomentSet
from .states import EnsembleShape

_AXIS_IDX = {"x": 0, "y": 1, "z": 2}

# facet label per criterion record, following the vertex naming
FACET_OF_CRITERION = {
    "three_moments": "Ax-Ay-Az",
    "three_variances": "Bx-By-Bz",
    "one_variance_x": "Bx-Ay-Az",
    "one_variance_y": "By-Az-Ax",
    "one_variance_z": "Bz-Ax-Ay",
    "two_variances_z": "Bx-By-Az",
    "two_variances_x": "By-Bz-Ax",
    "two_variances_y": "Bz-Bx-Ay",
}


@dataclass(frozen=True)
class PolytopeVertices:
    """The six extreme points A_l, B_l for a given mean spin."""

    shape: EnsembleShape
    jvec: np.ndarray
    A: dict
    B: dict

    @property
    def kappa(self) -> float:
        return (self.shape.N - 1) / self.shape.N

    def point(self, label: str) -> np.ndarray:
        family, ax = label[0], label[-1]
        return (self.A if family == "A" else self.B)[ax]

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "N": self.shape.N,
            "two_j": self.shape.j.twice,
            "jvec": [float(v) for v in self.jvec],
            "vertices": {
                f"{fam}_{ax}": [float(c) for c in verts[ax]]
                for fam, verts in (("A", self.A), ("B", self.B))
                for ax in "xyz"
            },
        }


def vertices(shape: EnsembleShape, jvec) -> PolytopeVertices:
    """Closed-form extreme points in (<Jt_x^2>, <Jt_y^2>, <Jt_z^2>) space."""
    jvec = np.asarray(jvec, dtype=float)
    if jvec.shape != (3,):
        raise ValueError("mean spin must be a 3-vector")
    if np.linalg.norm(jvec) > shape.Nj + 1e-9:
        raise ValueError(f"|mean spin| = {np.linalg.norm(jvec)} exceeds Nj = {shape.Nj}")
    N = shape.N
    jsq = shape.j.value ** 2
    kappa = (N - 1) / N
    A = {}
    B = {}
    for ax, k in _AXIS_IDX.items():
        perp = [l for l in range(3) if l != k]
        perp_sq = sum(jvec[l] ** 2 for l in perp)
        a = np.empty(3)
        b = np.empty(3)
        a[k] = N * (N - 1) * jsq - kappa * perp_sq
        b[k] = jvec[k] ** 2 + perp_sq / N - N * jsq
        for l in perp:
            a[l] = b[l] = kappa * jvec[l] ** 2
        A[ax] = a
        B[ax] = b
    return PolytopeVertices(shape, jvec, A, B)


@dataclass(frozen=True)
class FacetMargin:
    facet: str
    criterion: str
    margin: float
    violated: bool

    def to_json(self) -> dict:
        return {
            "facet": self.facet,
            "criterion": self.criterion,
            "margin": float(self.margin),
            "violated": self.violated,
        }


@dataclass(frozen=True)
class FacetMargins:
    """Margins of a moment point against all eight facets."""

    facets: tuple[FacetMargin, ...]
    member: bool
    nearest_violated: str | None

    def __getitem__(self, facet: str) -> FacetMargin:
        for f in self.facets:
            if f.facet == facet:
                return f
        raise KeyError(facet)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "member": self.member,
            "nearest_violated": self.nearest_violated,
            "facets": [f.to_json() for f in self.facets],
        }


def membership(m: MomentSet) -> FacetMargins:
    """Facet margins of the state's moment point; margins coincide with the
    criteria-report margins of the same conditions."""
    report = evaluate_optimal_set(m)
    facets = []
    worst = None
    for crit, facet in FACET_OF_CRITERION.items():
        rec = report[crit]
        facets.append(FacetMargin(facet, crit, rec.margin, rec.violated))
        if rec.violated and (worst is None or rec.margin < worst[1]):
            worst = (facet, rec.margin)
    member = worst is None
    return FacetMargins(tuple(facets), member, None if member else worst[0])


FACET_VERTICES = {
    "Ax-Ay-Az": ("A_x", "A_y", "A_z"),
    "Bx-By-Bz": ("B_x", "B_y", "B_z"),
    "Bx-Ay-Az": ("B_x", "A_y", "A_z"),
    "By-Az-Ax": ("B_y", "A_z", "A_x"),
    "Bz-Ax-Ay": ("B_z", "A_x", "A_y"),
    "Bx-By-Az": ("B_x", "B_y", "A_z"),
    "By-Bz-Ax": ("B_y", "B_z", "A_x"),
    "Bz-Bx-Ay": ("B_z", "B_x", "A_y"),
}


def facet_mesh(verts: PolytopeVertices, points_per_edge: int = 8):
    """Barycentric sample points of each triangular facet, as
    (facet, x, y, z) rows for CSV export."""
    rows = []
    n = max(2, points_per_edge)
    for facet, labels in FACET_VERTICES.items():
        corners = [verts.point(lbl) for lbl in labels]
        for i in range(n + 1):
            for k in range(n + 1 - i):
                u, v = i / n, k / n
                pt = (1 - u - v) * corners[0] + u * corners[1] + v * corners[2]
                rows.append((facet, float(pt[0]), float(pt[1]), float(pt[2])))
    return rows
