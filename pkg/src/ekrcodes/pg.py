"""Points, hyperplanes and lines of PG(k-1, q) and projection from a point.

Points are canonical vectors whose first nonzero coordinate is 1, listed in
lexicographic order of their coordinate codes. Hyperplanes use the same
representation for their dual vectors. Bulk work happens on numpy code arrays;
the dataclasses below are the public, hashable view.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .config import check_cap
from .errors import DimensionMismatch, DuplicatePoints, FieldMismatch, ProjectCenterItself
from .gf import GF


def all_vectors(q: int, k: int) -> np.ndarray:
    """Every vector of F_q^k as a (q**k, k) code array, lexicographic order."""
    idx = np.arange(q**k, dtype=np.int64)
    out = np.empty((q**k, k), dtype=np.int64)
    for c in range(k - 1, -1, -1):
        idx, out[:, c] = np.divmod(idx, q)
    return out


def vector_index(q: int, A) -> np.ndarray:
    """Inverse of :func:`all_vectors`: the lexicographic rank of each row."""
    A = np.asarray(A, dtype=np.int64)
    idx = np.zeros(A.shape[:-1], dtype=np.int64)
    for c in range(A.shape[-1]):
        idx = idx * q + A[..., c]
    return idx


def num_points(k: int, q: int) -> int:
    return (q**k - 1) // (q - 1)


@functools.lru_cache(maxsize=64)
def _point_array(k: int, F: GF) -> np.ndarray:
    blocks = []
    for lead in range(k - 1, -1, -1):
        tail = all_vectors(F.q, k - 1 - lead)
        block = np.zeros((len(tail), k), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = tail
        blocks.append(block)
    arr = np.concatenate(blocks)
    arr.flags.writeable = False
    return arr


def point_array(k: int, F: GF, cap: int | None = None) -> np.ndarray:
    """Canonical points of PG(k-1, q) as a read-only (N, k) code array."""
    check_cap(F.q**k, cap, f"PG({k - 1},{F.q}) enumeration")
    return _point_array(k, F)


def canonical_rows(F: GF, A) -> np.ndarray:
    """Scale each nonzero row so that its first nonzero entry is 1."""
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    nz = A != 0
    if not nz.any(axis=1).all():
        raise ValueError("zero vector has no projective point")
    lead = nz.argmax(axis=1)
    inv = F.vinv(A[np.arange(len(A)), lead])
    return F.vmul(A, inv[:, None])


def dot_matrix(F: GF, A, B, chunk: int = 1 << 22) -> np.ndarray:
    """Field dot products A_i . B_j for code arrays A (m, k), B (n, k)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch("vector lengths differ")
    rows = max(1, chunk // max(1, len(B)))
    parts = [F.matmul(A[s:s + rows], B.T) for s in range(0, len(A), rows)]
    return np.concatenate(parts) if parts else np.zeros((0, len(B)), dtype=np.int64)


def incidence(F: GF, duals, points) -> np.ndarray:
    """Boolean incidence matrix: hyperplane i contains point j."""
    return dot_matrix(F, duals, points) == 0


def rank(F: GF, rows) -> int:
    """Rank over F by Gaussian elimination on a copy."""
    M = [list(map(int, r)) for r in rows]
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(x, inv) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        r += 1
    return r


def _canonical_tuple(F: GF, coords) -> tuple[int, ...]:
    coords = [int(c) for c in coords]
    for c in coords:
        if c:
            inv = F.inv(c)
            return tuple(F.mul(x, inv) for x in coords)
    raise ValueError("zero vector has no projective point")


@dataclass(frozen=True)
class ProjPoint:
    field: GF
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", _canonical_tuple(self.field, self.coords))

    @property
    def k(self) -> int:
        return len(self.coords)

    def __str__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"

    def __lt__(self, other):
        return self.coords < other.coords


@dataclass(frozen=True)
class Hyperplane:
    field: GF
    dual: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dual", _canonical_tuple(self.field, self.dual))

    @property
    def k(self) -> int:
        return len(self.dual)

    def __str__(self):
        return "[" + ":".join(str(c) for c in self.dual) + "]"

    def __lt__(self, other):
        return self.dual < other.dual


@dataclass(frozen=True)
class Line:
    base: ProjPoint
    dir: ProjPoint
    points: tuple[ProjPoint, ...]

    def __contains__(self, P: ProjPoint) -> bool:
        return P in self.points


def _same_space(a, b) -> None:
    if a.field != b.field:
        raise FieldMismatch("objects over different fields")
    if a.k != b.k:
        raise DimensionMismatch(f"dimensions {a.k} and {b.k}")


def enumerate_points(k: int, F: GF, cap: int | None = None) -> list[ProjPoint]:
    return [ProjPoint(F, tuple(r)) for r in point_array(k, F, cap).tolist()]


def enumerate_hyperplanes(k: int, F: GF, cap: int | None = None) -> list[Hyperplane]:
    return [Hyperplane(F, tuple(r)) for r in point_array(k, F, cap).tolist()]


def incident(P: ProjPoint, H: Hyperplane) -> bool:
    _same_space(P, H)
    F = P.field
    acc = 0
    for a, b in zip(P.coords, H.dual):
        acc = F.add(acc, F.mul(a, b))
    return acc == 0


def hyperplanes_through(P: ProjPoint, cap: int | None = None) -> list[Hyperplane]:
    duals = point_array(P.k, P.field, cap)
    mask = dot_matrix(P.field, duals, np.array([P.coords]))[:, 0] == 0
    return [Hyperplane(P.field, tuple(r)) for r in duals[mask].tolist()]


def points_on(H: Hyperplane, cap: int | None = None) -> list[ProjPoint]:
    pts = point_array(H.k, H.field, cap)
    mask = dot_matrix(H.field, pts, np.array([H.dual]))[:, 0] == 0
    return [ProjPoint(H.field, tuple(r)) for r in pts[mask].tolist()]


def project_rows(F: GF, center, A) -> np.ndarray:
    """Project the rows of A from the canonical point ``center``.

    The center's leading coordinate j is used as pivot: each row r becomes
    r - r_j * center, and coordinate j is then dropped. Rows equal to the
    center (projectively) raise :class:`ProjectCenterItself`.
    """
    center = np.asarray(center, dtype=np.int64)
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    j = int(np.flatnonzero(center)[0])
    red = F.vsub(A, F.vmul(A[:, j, None], center[None, :]))
    red = np.delete(red, j, axis=1)
    if not (red != 0).any(axis=1).all():
        raise ProjectCenterItself("cannot project the center from itself")
    return canonical_rows(F, red)


def project_from(center: ProjPoint, target: ProjPoint) -> ProjPoint:
    _same_space(center, target)
    if center == target:
        raise ProjectCenterItself("cannot project the center from itself")
    row = project_rows(center.field, center.coords, [target.coords])[0]
    return ProjPoint(center.field, tuple(row.tolist()))


def collinear(P1: ProjPoint, P2: ProjPoint, P3: ProjPoint) -> bool:
    _same_space(P1, P2)
    _same_space(P1, P3)
    if P1 == P2 or P1 == P3 or P2 == P3:
        raise DuplicatePoints("collinearity needs three distinct points")
    return rank(P1.field, [P1.coords, P2.coords, P3.coords]) <= 2


def line_through(P1: ProjPoint, P2: ProjPoint) -> Line:
    _same_space(P1, P2)
    if P1 == P2:
        raise DuplicatePoints("a line needs two distinct points")
    F = P1.field
    a = np.array(P1.coords)
    b = np.array(P2.coords)
    lam = np.arange(F.q)
    rows = F.vadd(a[None, :], F.vmul(lam[:, None], b[None, :]))
    rows = np.concatenate([rows, b[None, :]])
    pts = sorted({tuple(r) for r in canonical_rows(F, rows).tolist()})
    return Line(P1, P2, tuple(ProjPoint(F, p) for p in pts))


def lines_through(Q: ProjPoint, cap: int | None = None) -> list[Line]:
    """All lines through Q, grouped by the projection of their other points."""
    F = Q.field
    pts = point_array(Q.k, F, cap)
    others = pts[~(pts == np.array(Q.coords)).all(axis=1)]
    proj = project_rows(F, Q.coords, others)
    groups: dict[tuple, list] = {}
    for img, p in zip(map(tuple, proj.tolist()), others.tolist()):
        groups.setdefault(img, []).append(tuple(p))
    out = []
    for img in sorted(groups):
        members = sorted(groups[img] + [Q.coords])
        out.append(Line(Q, ProjPoint(F, groups[img][0]), tuple(ProjPoint(F, m) for m in members)))
    return out
