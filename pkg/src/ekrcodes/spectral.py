"""Avoiding hyperplanes, incidence profiles and exact spectra.

The non-intersection graph Gamma_T of a code joins two codewords when they
agree in exactly t positions for some t in T. It is a Cayley graph on the
coefficient space, and its eigenvalue on the characters attached to a point
P is q*m_P - |M|, where M is the set of hyperplanes meeting the projective
system in a count from T and m_P counts those through P. Everything here is
exact: integers, Fractions, and integer matrix products for verification.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .codes import Family, LinearCode, ers_create, star
from .config import CONFIG, check_cap
from .errors import (
    BadApex,
    BadParameters,
    FormulaMismatch,
    ModulePropertyFails,
    NonnegativeSpectrum,
    NotRegular,
    VerificationFailed,
    WeakEKRFails,
)
from .pg import (
    Hyperplane,
    Line,
    ProjPoint,
    canonical_rows,
    incidence,
    num_points,
    point_array,
    project_rows,
    rank,
    vector_index,
)


# avoiding sets and profiles ---------------------------------------------------

@dataclass(frozen=True)
class AvoidSet:
    T: frozenset
    duals: np.ndarray = field(repr=False)
    field_: object = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.duals)

    @property
    def hyperplanes(self) -> list[Hyperplane]:
        return [Hyperplane(self.field_, tuple(r)) for r in self.duals.tolist()]


def _normalize_T(code: LinearCode, T) -> frozenset:
    T = frozenset(int(t) for t in (T if T is not None else {0}))
    if any(not 0 <= t < code.n for t in T):
        raise BadParameters(f"T must be a subset of 0..{code.n - 1}")
    return T


def avoiding_hyperplanes(code: LinearCode, T=None, cap: int | None = None) -> AvoidSet:
    """Hyperplanes meeting the projective system in a number of points from T."""
    T = _normalize_T(code, T)
    key = ("avoid", T)
    if key not in code._cache:
        duals, counts = code.hyperplane_meets(cap)
        M = duals[np.isin(counts, list(T))]
        M.flags.writeable = False
        code._cache[key] = AvoidSet(T, M, code.field)
    return code._cache[key]


@dataclass(frozen=True)
class IncidenceProfile:
    """Number of avoiding hyperplanes through every point of PG(k-1,q)."""

    points: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    on_system: np.ndarray = field(repr=False)
    size_M: int = 0

    def count(self, P: ProjPoint) -> int:
        row = np.flatnonzero((self.points == np.array(P.coords)).all(axis=1))
        return int(self.counts[row[0]])

    def value_classes(self) -> dict[int, int]:
        vals, mult = np.unique(self.counts, return_counts=True)
        return dict(zip(vals.tolist(), mult.tolist()))


def incidence_profile(code: LinearCode, T=None, cap: int | None = None) -> IncidenceProfile:
    T = _normalize_T(code, T)
    key = ("profile", T)
    if key not in code._cache:
        M = avoiding_hyperplanes(code, T, cap)
        pts = point_array(code.k, code.field, cap)
        counts = incidence(code.field, M.duals, pts).sum(axis=0) if len(M) else np.zeros(len(pts), dtype=np.int64)
        sysidx = set(vector_index(code.q, code.system).tolist())
        on = np.isin(vector_index(code.q, pts), list(sysidx))
        code._cache[key] = IncidenceProfile(pts, counts.astype(np.int64), on, len(M))
    return code._cache[key]


@dataclass(frozen=True)
class StarIndicator:
    """The indicator of {codeword with coefficients w : w.v = alpha}."""

    v: tuple[int, ...]
    alpha: int
    field_: object = field(compare=False, repr=False)

    @classmethod
    def make(cls, F, v, alpha: int) -> StarIndicator:
        v = [int(x) for x in v]
        lead = next(x for x in v if x)
        inv = F.inv(lead)
        return cls(tuple(F.mul(x, inv) for x in v), F.mul(int(alpha), inv), F)

    def values(self, coeffs: np.ndarray) -> np.ndarray:
        F = self.field_
        dots = F.matmul(coeffs, np.array(self.v)[:, None])[:, 0]
        return dots == self.alpha


# spectra ---------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicities, largest first."""

    pairs: tuple

    def __post_init__(self):
        merged: dict[int, int] = {}
        for v, m in self.pairs:
            merged[int(v)] = merged.get(int(v), 0) + int(m)
        pairs = tuple(sorted(((v, m) for v, m in merged.items() if m), reverse=True))
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_dict(cls, d: dict) -> Spectrum:
        return cls(tuple(d.items()))

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def vertices(self) -> int:
        return sum(m for _, m in self.pairs)

    @property
    def largest(self) -> int:
        return self.pairs[0][0]

    @property
    def smallest(self) -> int:
        return self.pairs[-1][0]

    def moment(self, m: int) -> int:
        return sum(mult * v**m for v, mult in self.pairs)

    def to_json(self) -> dict:
        return {"eigenvalues": [{"value": v, "mult": m} for v, m in self.pairs]}


@dataclass(frozen=True)
class BipartiteSpectrum:
    """Spectrum of a bipartite graph: each nonzero square lambda^2 stands for
    the pair +-lambda, plus an explicit multiplicity for the eigenvalue 0."""

    squares: tuple
    zero: int

    def __post_init__(self):
        object.__setattr__(self, "squares", Spectrum(self.squares).pairs)

    @property
    def vertices(self) -> int:
        return 2 * sum(m for _, m in self.squares) + self.zero

    def gram(self) -> Spectrum:
        """Spectrum of M M^T on the smaller side."""
        return Spectrum(self.squares)

    def to_json(self) -> dict:
        return {
            "squares": [{"value": v, "pair_mult": m} for v, m in self.squares],
            "zero_mult": self.zero,
        }


def gamma_T_spectrum(code: LinearCode, T=None, cap: int | None = None) -> Spectrum:
    q = code.q
    prof = incidence_profile(code, T, cap)
    M = prof.size_M
    pairs = [((q - 1) * M, 1)]
    for m, npts in prof.value_classes().items():
        pairs.append((q * m - M, (q - 1) * npts))
    return Spectrum(tuple(pairs))


# exact verification ------------------------------------------------------------

def _int_vector_apply(A: np.ndarray, x: np.ndarray, bound: int) -> np.ndarray:
    if bound < 1 << 62:
        return A @ x.astype(np.int64)
    return A.astype(object) @ x.astype(object)


def _closed_walks(apply, N: int, mmax: int, deg: int) -> list[int]:
    """(A^m)_{00} for m = 0..mmax via walk vectors from vertex 0."""
    half = (mmax + 1) // 2
    e0 = np.zeros(N, dtype=np.int64)
    e0[0] = 1
    vecs = [e0]
    for j in range(1, half + 1):
        vecs.append(apply(vecs[-1], max(deg, 1) ** j * max(deg, 1)))
    py = [list(map(int, v.tolist())) for v in vecs]
    out = []
    for m in range(mmax + 1):
        a, b = py[(m + 1) // 2], py[m // 2]
        out.append(sum(x * y for x, y in zip(a, b)))
    return out


def _difference_index(code: LinearCode, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Index of coefficient vector cols[j] - rows[i], shape (len(rows), len(cols))."""
    F = code.field
    C = code.coefficient_vectors()
    return vector_index(code.q, F.vsub(C[cols][None, :, :], C[rows][:, None, :]))


def _agreement_adjacency(code: LinearCode, T: frozenset, members=None, chunk: int = 1 << 23) -> np.ndarray:
    """Dense 0/1 matrix: words agree in exactly t positions for some t in T."""
    W = code.words()
    if members is not None:
        W = W[members]
    N, n = W.shape
    A = np.zeros((N, N), dtype=np.int64)
    Tl = list(T)
    rows = max(1, chunk // max(1, N * n))
    for s in range(0, N, rows):
        agree = (W[s:s + rows, None, :] == W[None, :, :]).sum(axis=2)
        A[s:s + rows] = np.isin(agree, Tl)
    return A


def _assert_cayley(code: LinearCode, A: np.ndarray, chunk: int = 1 << 22) -> None:
    N = len(A)
    rows = max(1, chunk // (N * code.k))
    allc = np.arange(N)
    for s in range(0, N, rows):
        r = np.arange(s, min(N, s + rows))
        idx = _difference_index(code, r, allc)
        if not (A[r] == A[0][idx]).all():
            raise VerificationFailed("adjacency is not translation invariant")


def _sparse_apply(code: LinearCode, conn: np.ndarray):
    """x -> A x for the Cayley graph with connection set ``conn`` (indices)."""
    F = code.field
    C = code.coefficient_vectors()
    shifts = [vector_index(code.q, F.vadd(C, C[s][None, :])) for s in conn]

    def apply(x, bound):
        dtype = np.int64 if bound < 1 << 62 else object
        x = x.astype(dtype)
        y = np.zeros(len(x), dtype=dtype)
        for perm in shifts:
            y = y + x[perm]
        return y

    return apply


def verify_spectrum_exact(code: LinearCode, T, spectrum: Spectrum, cap: int | None = None,
                          raise_on_failure: bool = False) -> bool:
    """Check a claimed spectrum of Gamma_T by eigenvectors and trace moments.

    (a) For one point P of each incidence class, x = q*[w.P = 1] - 1 must
    satisfy A x = (q m_P - |M|) x, and that value must be claimed. The
    all-ones vector must have the claimed top eigenvalue.
    (b) tr(A^m) = sum mult * lambda^m for m = 0..(number of distinct values).
    tr(A^m) is N*(A^m)_00 once A is checked to be translation invariant.
    """
    try:
        _verify_gamma(code, _normalize_T(code, T), spectrum, cap)
    except VerificationFailed:
        if raise_on_failure:
            raise
        return False
    return True


def _verify_gamma(code: LinearCode, T: frozenset, spectrum: Spectrum, cap) -> None:
    N = code.size
    check_cap(N, cap if cap is not None else CONFIG.moment_cap, "spectrum verification")
    q = code.q
    C = code.coefficient_vectors()
    dense = N <= CONFIG.dense_cap
    W = code.words()
    if dense:
        A = _agreement_adjacency(code, T)
        _assert_cayley(code, A)
        deg = int(A[0].sum())
        apply = lambda x, bound: _int_vector_apply(A, x, bound)  # noqa: E731
    else:
        agree = (W == 0).sum(axis=1)
        conn = np.flatnonzero(np.isin(agree, list(T)))
        conn = conn[conn != 0]
        deg = len(conn)
        apply = _sparse_apply(code, conn)

    claimed = spectrum.as_dict()
    ones = np.ones(N, dtype=np.int64)
    if not (apply(ones, deg) == deg).all():
        raise VerificationFailed("graph is not regular")
    if deg not in claimed:
        raise VerificationFailed(f"degree {deg} is not a claimed eigenvalue")

    prof = incidence_profile(code, T)
    seen = set()
    for pos, m in enumerate(prof.counts.tolist()):
        if m in seen:
            continue
        seen.add(m)
        v = prof.points[pos]
        lam = q * m - prof.size_M
        x = q * StarIndicator.make(code.field, v, 1).values(C).astype(np.int64) - 1
        Ax = apply(x, deg * q)
        if not (Ax == lam * x).all():
            bad = int(np.flatnonzero(Ax != lam * x)[0])
            raise VerificationFailed(
                f"eigenvector identity fails for point {tuple(v.tolist())} at vertex {bad}: "
                f"{int(Ax[bad])} != {lam}*{int(x[bad])}"
            )
        if lam not in claimed:
            raise VerificationFailed(f"eigenvalue {lam} of point {tuple(v.tolist())} is not claimed")

    D = len(claimed)
    walks = _closed_walks(apply, N, D, deg)
    for m in range(D + 1):
        tr = N * walks[m]
        expect = spectrum.moment(m)
        if tr != expect:
            raise VerificationFailed(f"trace moment m={m}: tr(A^m)={tr} but spectrum gives {expect}")


# the bipartite graph B(C, i, alpha) --------------------------------------------

def _lines_through_index(code: LinearCode, i: int):
    """Points other than Q = S_i grouped by line through Q, as index arrays."""
    prof = incidence_profile(code, {0})
    Q = code.system[i]
    pts = prof.points
    others = np.flatnonzero(~(pts == Q[None, :]).all(axis=1))
    proj = project_rows(code.field, Q, pts[others])
    keys = vector_index(code.q, proj)
    order = np.argsort(keys, kind="stable")
    groups = np.split(others[order], np.flatnonzero(np.diff(keys[order])) + 1)
    return prof, groups


def lambda_line(code: LinearCode, Q: ProjPoint, line: Line) -> Fraction:
    """q * sum over P on the line, P != Q, of (m_P - |M|/q)^2."""
    prof = incidence_profile(code, {0})
    if not prof.size_M:
        raise WeakEKRFails("no avoiding hyperplanes")
    q, M = code.q, prof.size_M
    if Q not in line.points:
        raise BadParameters("Q is not on the line")
    total = Fraction(0)
    for P in line.points:
        if P != Q:
            total += (Fraction(prof.count(P)) - Fraction(M, q)) ** 2
    return q * total


def line_lambdas(code: LinearCode, i: int) -> list[int]:
    """lambda_l for every line through S_i, as exact integers.

    Every avoiding hyperplane misses Q and so meets each line through Q in
    exactly one further point; hence sum m_P = |M| on the line and
    q*sum (m_P - |M|/q)^2 = q*sum m_P^2 - |M|^2 with no remainder.
    """
    prof, groups = _lines_through_index(code, i)
    q, M = code.q, prof.size_M
    out = []
    for g in groups:
        m = prof.counts[g].astype(object)
        if int(m.sum()) != M:
            raise VerificationFailed("a line through Q does not carry |M| incidences")
        out.append(q * int((m * m).sum()) - M * M)
    return out


def lambda_max(code: LinearCode, i: int) -> int:
    return max(line_lambdas(code, i))


def b_graph_spectrum(code: LinearCode, i: int) -> BipartiteSpectrum:
    if not 0 <= i < code.n:
        raise BadParameters(f"coordinate {i} out of range")
    q, k = code.q, code.k
    M = incidence_profile(code, {0}).size_M
    squares = [((q - 1) * M * M, 1)] + [(lam, q - 1) for lam in line_lambdas(code, i)]
    spec = BipartiteSpectrum(tuple(squares), (q - 2) * q ** (k - 1))
    nlines = (q ** (k - 1) - 1) // (q - 1)
    if 2 + 2 * (q - 1) * nlines + (q - 2) * q ** (k - 1) != q**k or spec.vertices != q**k:
        raise VerificationFailed("multiplicity bookkeeping does not add up to q^k")
    return spec


def b_graph_sides(code: LinearCode, i: int, alpha: int = 0) -> tuple[np.ndarray, np.ndarray]:
    W = code.words()
    left = np.flatnonzero(W[:, i] == alpha)
    right = np.flatnonzero(W[:, i] != alpha)
    return left, right


def b_graph_biadjacency(code: LinearCode, i: int, alpha: int = 0) -> np.ndarray:
    W = code.words()
    left, right = b_graph_sides(code, i, alpha)
    out = np.zeros((len(left), len(right)), dtype=np.int64)
    rows = max(1, (1 << 23) // max(1, len(right) * code.n))
    for s in range(0, len(left), rows):
        out[s:s + rows] = ~(W[left[s:s + rows], None, :] == W[None, right, :]).any(axis=2)
    return out


def verify_b_graph_spectrum(code: LinearCode, i: int, spectrum: BipartiteSpectrum,
                            raise_on_failure: bool = False) -> bool:
    """Check the claimed spectrum of B(C,i,0) through the Gram matrix M M^T.

    Degrees are counted directly, translation invariance of M M^T on the
    left side is asserted, then trace moments and one eigenvector per line
    through S_i are compared exactly.
    """
    try:
        _verify_b(code, i, spectrum)
    except VerificationFailed:
        if raise_on_failure:
            raise
        return False
    return True


def _verify_b(code: LinearCode, i: int, spectrum: BipartiteSpectrum) -> None:
    check_cap(code.size, CONFIG.dense_cap * 4, "bipartite verification")
    q, k = code.q, code.k
    Msize = incidence_profile(code, {0}).size_M
    B = b_graph_biadjacency(code, i)
    left, _ = b_graph_sides(code, i)
    if not (B.sum(axis=1) == (q - 1) * Msize).all() or not (B.sum(axis=0) == Msize).all():
        raise VerificationFailed("B(C,i,0) is not biregular with degrees (q-1)|M|, |M|")
    if spectrum.vertices != q**k:
        raise VerificationFailed(f"spectrum covers {spectrum.vertices} vertices, expected {q**k}")
    Gm = B @ B.T
    L = len(left)
    pos = {v: j for j, v in enumerate(left.tolist())}
    idx = _difference_index(code, left, left)
    remap = np.vectorize(pos.__getitem__)(idx)
    if not (Gm == Gm[0][remap]).all():
        raise VerificationFailed("M M^T is not translation invariant on the left side")

    gram = spectrum.gram()
    if gram.vertices != L:
        raise VerificationFailed("pair multiplicities do not add up to the left side")
    D = len(gram.pairs)
    top = gram.largest
    walks = _closed_walks(lambda x, bound: _int_vector_apply(Gm, x, bound), L, D, max(top, 1))
    for m in range(D + 1):
        if L * walks[m] != gram.moment(m):
            raise VerificationFailed(f"Gram trace moment m={m}: {L * walks[m]} != {gram.moment(m)}")

    # one eigenvector per line through Q: characters u with u not a multiple of Q
    F = code.field
    C = code.coefficient_vectors()[left]
    claimed = gram.as_dict()
    prof, groups = _lines_through_index(code, i)
    for g in groups:
        u = prof.points[g[0]]
        x = q * StarIndicator.make(F, u, 1).values(C).astype(np.int64) - 1
        lam = q * int((prof.counts[g].astype(object) ** 2).sum()) - Msize * Msize
        if not (Gm @ x == lam * x).all():
            raise VerificationFailed(f"Gram eigenvector identity fails for line through {tuple(u.tolist())}")
        if lam not in claimed:
            raise VerificationFailed(f"line value {lam} is not claimed")


# bounds ------------------------------------------------------------------------

def few_or_many_bound(code: LinearCode, i: int) -> Fraction:
    M = incidence_profile(code, {0}).size_M
    if M == 0:
        raise WeakEKRFails("no avoiding hyperplanes")
    return lambda_max(code, i) * Fraction(code.q ** (code.k - 1), M) ** 2


def eml_holds(code: LinearCode, i: int, s: int, t: int, edges: int = 0) -> bool:
    """Bipartite expander mixing inequality for subsets of sizes s (left) and t (right).

    (e - d_R/|L| s t)^2 <= lambda * s(|L|-s)/|L| * t(|R|-t)/|R|, lambda the
    largest line value, i.e. the square of the second eigenvalue.
    """
    q, k = code.q, code.k
    M = incidence_profile(code, {0}).size_M
    L, R = q ** (k - 1), (q - 1) * q ** (k - 1)
    lhs = (edges - Fraction(M, L) * s * t) ** 2
    rhs = lambda_max(code, i) * Fraction(s * (L - s), L) * Fraction(t * (R - t), R)
    return lhs <= rhs


def hoffman_bound(spectrum: Spectrum, vertex_count: int) -> Fraction:
    if spectrum.vertices != vertex_count:
        raise BadParameters("multiplicities do not add up to the vertex count")
    deg = spectrum.largest
    if spectrum.moment(2) != vertex_count * deg:
        raise NotRegular("sum of squared eigenvalues differs from n * largest eigenvalue")
    tau = spectrum.smallest
    if tau >= 0:
        raise NonnegativeSpectrum("smallest eigenvalue is not negative")
    return Fraction(vertex_count) / (Fraction(deg, -tau) + 1)


def min_off_system_incidence(code: LinearCode) -> int:
    prof = incidence_profile(code, {0})
    off = prof.counts[~prof.on_system]
    return int(off.min()) if len(off) else 0


def more_than_few_bound(code: LinearCode, family_size: int) -> Fraction:
    q, k, n = code.q, code.k, code.n
    M = incidence_profile(code, {0}).size_M
    t = min_off_system_incidence(code)
    if t == 0:
        raise ModulePropertyFails("some point off the system lies on no avoiding hyperplane")
    F = Fraction(family_size)
    inner = (F / q**k) * (Fraction(M, t) - 1) + 1 - Fraction(M, q * t)
    return F / q + Fraction(q ** (k - 1), n) * inner


def hm_family_size(code: LinearCode) -> int:
    return code.q ** (code.k - 1) - incidence_profile(code, {0}).size_M + 1


def hm_family(code: LinearCode, i: int, alpha: int, c) -> Family:
    """{c} together with every member of star (i, alpha) that meets c."""
    if c.word[i] == alpha:
        raise BadApex("the apex codeword must avoid the star value")
    st = star(code, i, alpha)
    W = st.words
    meets = (W == np.array(c.word)[None, :]).any(axis=1)
    fam = Family(code, list(st.indices[meets]) + [c.index])
    from .ekr import is_intersecting_family

    if not is_intersecting_family(fam, 1):
        raise VerificationFailed("constructed family is not intersecting")
    return fam


# the normal rational curve ----------------------------------------------------

def nrc_count_closed_form(q: int, k: int, t: int, printed: bool = False) -> int:
    """Hyperplanes of PG(k,q) meeting the normal rational curve in t points.

    Substituting weight w = q+1-t into the MDS weight distribution gives an
    inner binomial C(q-t, j). ``printed=True`` uses C(q+2-t, j) instead,
    the variant that disagrees with enumeration.
    """
    if not 0 <= t <= k:
        return 0
    top = q + 2 - t if printed else q - t
    return comb(q + 1, t) * sum((-1) ** j * comb(top, j) * q ** (k - t - j) for j in range(k - t + 1))


@dataclass
class NrcProfile:
    q: int
    k: int
    counts: dict
    closed_form: dict
    printed_variant: dict

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "counts": {str(t): c for t, c in self.counts.items()},
            "closed_form": {str(t): c for t, c in self.closed_form.items()},
            "printed_variant": {str(t): c for t, c in self.printed_variant.items()},
        }


def nrc_profile(q: int, k: int, cap: int | None = None) -> NrcProfile:
    code = ers_create(q, k)
    _, meets = code.hyperplane_meets(cap)
    vals = np.bincount(meets, minlength=k + 1).tolist()
    if len(vals) > k + 1:
        raise VerificationFailed("a hyperplane meets the curve in more than k points")
    counts = {t: vals[t] for t in range(k + 1)}
    closed = {t: nrc_count_closed_form(q, k, t) for t in range(k + 1)}
    printed = {t: nrc_count_closed_form(q, k, t, printed=True) for t in range(k + 1)}
    if counts != closed:
        raise FormulaMismatch(f"enumeration {counts} differs from closed form {closed}")
    if sum(counts.values()) != num_points(k + 1, q):
        raise FormulaMismatch("counts do not partition the hyperplanes")
    return NrcProfile(q, k, counts, closed, printed)


def mu(k: int, t: int) -> Fraction:
    if not 0 <= t <= k:
        raise BadParameters("need 0 <= t <= k")
    return Fraction(1, factorial(t)) * sum(Fraction((-1) ** j, factorial(j)) for j in range(k - t + 1))


def mu_checks(k_max: int) -> dict:
    sums = {k: sum(mu(k, t) for t in range(k + 1)) for k in range(0, k_max + 1)}
    rec = all(t * mu(k, t) == mu(k - 1, t - 1) for k in range(1, k_max + 1) for t in range(1, k + 1))
    return {
        "k_max": k_max,
        "sum_is_one": all(s == 1 for s in sums.values()),
        "recursion_holds": rec,
    }


@dataclass
class StProfile:
    q: int
    k: int
    points: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    max_deviation: Fraction = Fraction(0)
    max_deviation_by_t: dict = field(default_factory=dict)

    @property
    def empirical_delta(self) -> Fraction:
        return self.max_deviation / self.q ** (self.k - 2) if self.k >= 2 else self.max_deviation

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "off_curve_points": int(len(self.points)),
            "max_deviation": str(self.max_deviation),
            "max_deviation_by_t": {str(t): str(v) for t, v in self.max_deviation_by_t.items()},
            "empirical_delta": str(self.empirical_delta),
        }


def s_t_profile(q: int, k: int, cap: int | None = None) -> StProfile:
    """s_t(P): hyperplanes through an off-curve point P meeting the curve in t points."""
    code = ers_create(q, k)
    duals, meets = code.hyperplane_meets(cap)
    prof = incidence_profile(code, {0}, cap)
    off = prof.points[~prof.on_system]
    inc = incidence(code.field, duals, off)
    onehot = (meets[:, None] == np.arange(k + 1)[None, :]).astype(np.int64)
    s = inc.T.astype(np.int64) @ onehot
    through = num_points(k, q)
    if not (s.sum(axis=1) == through).all():
        raise VerificationFailed("s_t(P) do not sum to the hyperplanes through P")
    counts = nrc_profile(q, k, cap).counts
    for t in range(k + 1):
        if int(s[:, t].sum()) != counts[t] * (through - t):
            raise VerificationFailed(f"double counting fails at t={t}")
    by_t = {}
    scale = q ** (k - 1)
    for t in range(k + 1):
        target = mu(k, t) * scale
        col = s[:, t].tolist()
        by_t[t] = max(abs(Fraction(v) - target) for v in col) if col else Fraction(0)
    worst = max(by_t.values()) if by_t else Fraction(0)
    return StProfile(q, k, off, s, worst, by_t)


def harmonic(k: int) -> Fraction:
    return sum(Fraction(1, t) for t in range(1, k + 1))


def delta_recursion(delta3, k: int) -> Fraction:
    if k < 3:
        raise BadParameters("the recursion starts at k = 3")
    d = Fraction(delta3)
    for j in range(4, k + 1):
        d = 2 + (d + 4) * harmonic(j)
    return d


def _no_three_collinear(code: LinearCode) -> bool:
    S = code.system.tolist()
    from itertools import combinations

    return all(rank(code.field, trio) == 3 for trio in combinations(S, 3))


def stability_report(q: int, k: int, cap: int | None = None) -> dict:
    """Per-instance evaluation of the stability hypotheses for ERS(q,k)."""
    code = ers_create(q, k)
    prof = incidence_profile(code, {0}, cap)
    M = prof.size_M
    mu0 = mu(k, 0)
    dev_M = Fraction(M) - mu0 * q**k
    off = prof.counts[~prof.on_system]
    point_dev = max((abs(Fraction(int(m)) - Fraction(M, q)) for m in off), default=Fraction(0))
    one_minus_mu = 1 - mu0
    sqrt_wins = (one_minus_mu**2) < Fraction(1, 2)
    if sqrt_wins:
        const_sym, const_dec = "1/sqrt(2)", 1 / math.sqrt(2)
    else:
        const_sym, const_dec = str(one_minus_mu), float(one_minus_mu)
    return {
        "q": q,
        "k": k,
        "n": code.n,
        "no_three_collinear": _no_three_collinear(code),
        "length_bound": code.n <= q + 1,
        "avoid_count": M,
        "mu_k0": str(mu0),
        "avoid_deviation": str(dev_M),
        "tau": str(abs(dev_M) / q ** (k - 1)),
        "max_point_deviation": str(point_dev),
        "delta": str(point_dev / q ** (k - 2)) if k >= 2 else str(point_dev),
        "threshold_constant": const_sym,
        "threshold_constant_decimal": round(const_dec, 12),
        "threshold": f"{const_sym}*{q}^{k}",
        "threshold_decimal": round(const_dec * q**k, 6),
        "one_minus_mu": str(one_minus_mu),
        "sqrt_half_exceeds_one_minus_mu": sqrt_wins,
    }
