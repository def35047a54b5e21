"""Translation schemes on small polynomial spaces and their eigenmatrices.

Three families are supported:

* ``hom2`` and ``hom3``: binary forms of degree 2 or 3 over F_q, classed by
  the multiset of root multiplicities on PG(1, q) of a difference f - g;
* ``ternary2``: ternary quadratic forms, classed by how they factor over
  F_q and F_{q^2}.

Every class is closed under nonzero scalars, so classification runs on
projective representatives and is then spread to all multiples. The
eigenmatrix P comes from character sums over the dual projective space,
Q = |X| P^-1 by exact rational elimination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .codes import HomPoly
from .config import check_cap
from .ekr import delsarte_clique_bound
from .errors import BadRelationSet, NotAScheme, NotConstant, TableMismatch, ZeroPolynomial
from .gf import GF, field_of_order, poly_divmod, poly_trim, quadratic_extension
from .pg import all_vectors, canonical_rows, incidence, point_array, vector_index
from .spectral import Spectrum

FAMILIES = ("hom2", "hom3", "ternary2")
CLASS_COUNT = {"hom2": 3, "hom3": 5, "ternary2": 4}
DIMENSION = {"hom2": 3, "hom3": 4, "ternary2": 6}
# coefficient order for ternary quadratics
MONOMIALS = ("X^2", "XY", "XZ", "Y^2", "YZ", "Z^2")

_HOM_PATTERNS = {
    2: {(2,): 1, (1, 1): 2, (): 3},
    3: {(3,): 1, (2, 1): 2, (1, 1, 1): 3, (1,): 4, (): 5},
}


@dataclass(frozen=True)
class FactorType:
    family: str
    index: int

    def __str__(self):
        return f"R{self.index}"


# classification ---------------------------------------------------------------

def root_multiplicities(F: GF, coeffs) -> tuple[int, ...]:
    """Multiplicities of the projective roots of sum a_i X^i Y^(k-i), largest first."""
    coeffs = [int(c) for c in coeffs]
    k = len(coeffs) - 1
    f = poly_trim(coeffs)
    if not f:
        raise ZeroPolynomial("the zero form has no factor type")
    mults = []
    if k - (len(f) - 1) > 0:
        mults.append(k - (len(f) - 1))
    for r in range(F.q):
        m = 0
        lin = [F.neg(r), 1]
        while len(f) > 1:
            quo, rem = poly_divmod(F, f, lin)
            if poly_trim(rem):
                break
            f, m = quo, m + 1
        if m:
            mults.append(m)
    return tuple(sorted(mults, reverse=True))


def hom_factor_type(f, k: int | None = None, F: GF | None = None) -> FactorType:
    """Class of a binary form of degree 2 or 3 from its root multiplicities."""
    if isinstance(f, HomPoly):
        F, coeffs = f.field, f.coeffs
    else:
        coeffs = tuple(int(c) for c in f)
    if k is None:
        k = len(coeffs) - 1
    if k not in _HOM_PATTERNS or len(coeffs) != k + 1:
        raise ValueError("hom_factor_type handles degree 2 and 3 forms")
    if F is None:
        raise ValueError("a field is needed for raw coefficient tuples")
    return FactorType(f"hom{k}", _HOM_PATTERNS[k][root_multiplicities(F, coeffs)])


def _ternary_eval(F: GF, f, pt) -> int:
    x, y, z = (int(c) for c in pt)
    terms = ((x, x), (x, y), (x, z), (y, y), (y, z), (z, z))
    acc = 0
    for c, (a, b) in zip(f, terms):
        if c:
            acc = F.add(acc, F.mul(int(c), F.mul(a, b)))
    return acc


def _kernel_basis(F: GF, line) -> list[list[int]]:
    line = [int(c) for c in line]
    j = next(i for i, c in enumerate(line) if c)
    inv = F.inv(line[j])
    basis = []
    for m in range(3):
        if m == j:
            continue
        v = [0, 0, 0]
        v[m] = 1
        v[j] = F.neg(F.mul(line[m], inv))
        basis.append(v)
    return basis


def divides(F: GF, line, f) -> bool:
    """Whether the linear form ``line`` divides the ternary quadratic f.

    The restriction of f to the line is a binary quadratic; it vanishes
    identically iff it has three projective zeros, tested at u, w, u+w.
    """
    u, w = _kernel_basis(F, line)
    uw = [F.add(a, b) for a, b in zip(u, w)]
    return all(_ternary_eval(F, f, p) == 0 for p in (u, w, uw))


def ternary_quadratic_type(f, F: GF) -> FactorType:
    """Class of a ternary quadratic (coefficients in ``MONOMIALS`` order)."""
    f = [int(c) for c in f]
    if len(f) != 6:
        raise ValueError("a ternary quadratic has 6 coefficients")
    if not any(f):
        raise ZeroPolynomial("the zero form has no factor type")
    lines = point_array(3, F)
    divisors = sum(divides(F, L, f) for L in lines.tolist())
    if divisors >= 2:
        return FactorType("ternary2", 2)
    if divisors == 1:
        return FactorType("ternary2", 1)
    E = quadratic_extension(F)
    if any(divides(E, L, f) for L in point_array(3, E).tolist()):
        return FactorType("ternary2", 3)
    return FactorType("ternary2", 4)


def _linear_products(F: GF, A, B) -> np.ndarray:
    a1, b1, c1 = A[:, 0], A[:, 1], A[:, 2]
    a2, b2, c2 = B[:, 0], B[:, 1], B[:, 2]
    m = F.vmul
    return np.stack([
        m(a1, a2),
        F.vadd(m(a1, b2), m(a2, b1)),
        F.vadd(m(a1, c2), m(a2, c1)),
        m(b1, b2),
        F.vadd(m(b1, c2), m(b2, c1)),
        m(c1, c2),
    ], axis=1)


def _ternary_rep_labels(F: GF, points: np.ndarray) -> np.ndarray:
    """Classes of all projective ternary quadratics by building the factored ones."""
    q = F.q
    size = q**6
    lab = np.full(size, 4, dtype=np.int64)
    L = point_array(3, F)

    def mark(rows, cls):
        idx = vector_index(q, canonical_rows(F, rows))
        if (lab[idx] != 4).any():
            raise NotAScheme("factor classes overlap")
        lab[idx] = cls

    mark(_linear_products(F, L, L), 1)
    i, j = np.triu_indices(len(L), k=1)
    mark(_linear_products(F, L[i], L[j]), 2)
    E = quadratic_extension(F)
    LE = point_array(3, E)
    irr = LE[(LE >= q).any(axis=1)]
    conj = E.vpow(irr, q)
    prod = canonical_rows(E, _linear_products(E, irr, conj))
    if (prod >= q).any():
        raise NotAScheme("norm form has coefficients outside the base field")
    idx = np.unique(vector_index(q, prod))
    if (lab[idx] != 4).any():
        raise NotAScheme("factor classes overlap")
    lab[idx] = 3
    return lab[vector_index(q, points)]


def _rep_labels(family: str, F: GF, points: np.ndarray) -> np.ndarray:
    if family == "ternary2":
        return _ternary_rep_labels(F, points)
    k = DIMENSION[family] - 1
    return np.array([_HOM_PATTERNS[k][root_multiplicities(F, p)] for p in points.tolist()], dtype=np.int64)


# schemes -----------------------------------------------------------------------

@dataclass
class TranslationScheme:
    family: str
    field: GF
    dim: int
    points: np.ndarray
    rep_labels: np.ndarray
    labels: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def d(self) -> int:
        return CLASS_COUNT[self.family]

    @property
    def order(self) -> int:
        return self.q**self.dim

    @property
    def projective_sizes(self) -> list[int]:
        return [int((self.rep_labels == i).sum()) for i in range(1, self.d + 1)]

    @property
    def valencies(self) -> list[int]:
        return [1] + [(self.q - 1) * s for s in self.projective_sizes]

    def type_of(self, v) -> int:
        return int(self.labels[int(vector_index(self.q, np.asarray(v)))])


def build_scheme(family: str, q: int, cap: int | None = None) -> TranslationScheme:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    dim = DIMENSION[family]
    check_cap(q**dim, cap, f"{family} scheme over GF({q})")
    F = field_of_order(q)
    pts = point_array(dim, F)
    rep = _rep_labels(family, F, pts)
    allv = all_vectors(q, dim)
    labels = np.zeros(q**dim, dtype=np.int64)
    nz = (allv != 0).any(axis=1)
    pos = np.searchsorted(vector_index(q, pts), vector_index(q, canonical_rows(F, allv[nz])))
    labels[nz] = rep[pos]
    if set(np.unique(rep).tolist()) != set(range(1, CLASS_COUNT[family] + 1)):
        raise NotAScheme("some relation class is empty")
    return TranslationScheme(family, F, dim, pts, rep, labels)


@dataclass
class EigenMatrices:
    """P[j][i]: eigenvalue of relation i on eigenspace j; Q = |X| P^-1.

    Columns of P follow the relation order R0..Rd. Row 0 is the trivial
    character; rows 1..d are dual classes in order of first appearance
    among canonical dual points.
    """

    P: list
    Q: list
    multiplicities: list
    dual_sizes: list
    dual_representatives: list

    @property
    def formally_self_dual(self) -> bool:
        return self.P == self.Q


def _inverse(M: list[list[int]]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise NotAScheme("eigenmatrix is singular")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def scheme_eigenmatrices(scheme: TranslationScheme) -> EigenMatrices:
    if "eig" in scheme._cache:
        return scheme._cache["eig"]
    F, q, d = scheme.field, scheme.q, scheme.d
    pts = scheme.points
    onehot = np.zeros((len(pts), d), dtype=np.int64)
    onehot[np.arange(len(pts)), scheme.rep_labels - 1] = 1
    sizes = onehot.sum(axis=0)
    counts = np.zeros((len(pts), d), dtype=np.int64)
    step = max(1, (1 << 22) // len(pts))
    for s in range(0, len(pts), step):
        counts[s:s + step] = incidence(F, pts[s:s + step], pts).astype(np.int64) @ onehot
    tuples = q * counts - sizes[None, :]
    seen: dict[tuple, int] = {}
    order, reps = [], []
    for j, row in enumerate(map(tuple, tuples.tolist())):
        if row not in seen:
            seen[row] = len(order)
            order.append(row)
            reps.append(j)
    if len(order) != d:
        raise NotAScheme(f"{len(order)} distinct dual tuples for {d} classes")
    dual_count = np.bincount([seen[tuple(r)] for r in tuples.tolist()], minlength=d)
    P = [[1] + [(q - 1) * int(s) for s in sizes]] + [[1] + list(r) for r in order]
    N = scheme.order
    Qf = [[x * N for x in row] for row in _inverse(P)]
    if any(x.denominator != 1 for row in Qf for x in row):
        raise NotAScheme("Q is not integral")
    Q = [[int(x) for x in row] for row in Qf]
    mult = [1] + [(q - 1) * int(c) for c in dual_count]
    if Q[0] != mult:
        raise NotAScheme("dual class sizes disagree with the first row of Q")
    val = P[0]
    for j in range(d + 1):
        if Fraction(N) / sum(Fraction(P[j][i] ** 2, val[i]) for i in range(d + 1)) != mult[j]:
            raise NotAScheme("orthogonality relation fails")
    eig = EigenMatrices(P, Q, mult, [int(c) for c in dual_count],
                        [tuple(pts[r].tolist()) for r in reps])
    scheme._cache["eig"] = eig
    return eig


def matmul_int(A, B) -> list[list[int]]:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


# closed forms -------------------------------------------------------------------

def _F(x) -> int:
    x = Fraction(x)
    if x.denominator != 1:
        raise ValueError(f"table entry {x} is not an integer")
    return int(x)


def _table(rows) -> list[list[int]]:
    return [[_F(x) for x in r] for r in rows]


def closed_form_tables(family: str, q: int) -> tuple[str, list, list]:
    """(name, P, Q) of the closed-form eigenmatrices for this family and q."""
    h = Fraction(1, 2)
    s = Fraction(1, 6)
    t = Fraction(1, 3)
    if family == "hom2":
        if q % 2:
            P = [[1, q*q - 1, h*q*(q*q - 1), h*q*(q - 1)**2],
                 [1, -1, h*q*(q - 1), -h*q*(q - 1)],
                 [1, q - 1, -q, 0],
                 [1, -q - 1, 0, q]]
            return "hom2_odd", _table(P), _table(P)
        P = [[1, q*q - 1, h*q*(q*q - 1), h*q*(q - 1)**2],
             [1, -1, h*q*(q - 1), -h*q*(q - 1)],
             [1, q*q - 1, -h*q*(q + 1), -h*q*(q - 1)],
             [1, -1, -h*q, h*q]]
        Q = [[1, q*q - 1, q - 1, (q + 1)*(q - 1)**2],
             [1, -1, q - 1, -q + 1],
             [1, q - 1, -1, -q + 1],
             [1, -q - 1, -1, q + 1]]
        return "hom2_even", _table(P), _table(Q)
    if family == "hom3":
        top = [1, q*q - 1, q*(q*q - 1), s*(q - 1)**2*q*(q + 1), h*(q - 1)**2*q*(q + 1), t*(q - 1)**2*q*(q + 1)]
        if q % 3 == 0:
            P = [top,
                 [1, -1, q*(q - 1), s*q*(q - 1)*(2*q - 1), -h*q*(q - 1), -t*(q - 1)*q*(q + 1)],
                 [1, q*q - 1, -q, -s*q*(q - 1), -h*q*(q - 1), -t*q*(q - 1)],
                 [1, -1, q*(q - 1), -s*q*(3*q - 1), -h*q*(q - 1), t*q],
                 [1, -1, -q, s*q*(q + 1), -h*q*(q - 1), t*q*(q + 1)],
                 [1, -1, -q, -s*q*(q - 1), h*q*(q + 1), -t*q*(q - 1)]]
            Q = [[1, q*q - 1, q*q - 1, (q - 1)**2*(q + 1), h*(q - 1)**2*q*(q + 1), h*(q - 1)**2*q*(q + 1)],
                 [1, -1, q*q - 1, -(q - 1), -h*q*(q - 1), -h*q*(q - 1)],
                 [1, q - 1, -1, (q - 1)**2, -h*q*(q - 1), -h*q*(q - 1)],
                 [1, 2*q - 1, -1, -(3*q - 1), h*q*(q + 1), -h*q*(q - 1)],
                 [1, -1, -1, -(q - 1), -h*q*(q - 1), h*q*(q + 1)],
                 [1, -(q + 1), -1, 1, h*q*(q + 1), -h*q*(q - 1)]]
            return "hom3_3_divides_q", _table(P), _table(Q)
        e = 1 if q % 3 == 1 else -1
        P = [top,
             [1, -1, q*(q - 1), s*q*(q - 1)*(2*q - 1), -h*q*(q - 1), -t*q*(q - 1)*(q + 1)],
             [1, q - 1, q*(q - 2), -h*q*(q - 1), -h*q*(q - 1), 0],
             [1, 2*q - 1, -3*q, s*q*(e*q + 5), h*q*(-e*q + 1), t*q*(e*q - 1)],
             [1, -1, -q, s*q*(-e*q + 1), h*q*(e*q + 1), t*q*(-e*q + 1)],
             [1, -(q + 1), 0, s*q*(e*q - 1), h*q*(-e*q + 1), t*q*(e*q + 2)]]
        name = "hom3_eps_plus" if e == 1 else "hom3_eps_minus"
        return name, _table(P), _table(P)
    if family == "ternary2":
        c = q*q + q + 1
        top = [1, q**3 - 1, h*q*(q*q - 1)*c, h*q*(q - 1)**2*c, q*q*(q - 1)**2*c]
        if q % 2:
            P = [top,
                 [1, -1, h*q*(q + 1)**2*(q - 1), -h*q*(q - 1)*(q*q + 1), -q*q*(q - 1)],
                 [1, q*q - 1, h*q*(q*q - 2*q - 1), h*q*(q - 1)**2, -q*q*(q - 1)],
                 [1, -(q*q + 1), h*q*(q*q - 1), h*q*(q*q + 1), -q*q*(q - 1)],
                 [1, -1, -h*q*(q + 1), -h*q*(q - 1), q*q]]
            return "ternary2_odd", _table(P), _table(P)
        P = [top,
             [1, -1, h*q*(q + 1)**2*(q - 1), -h*q*(q - 1)*(q*q + 1), -q*q*(q - 1)],
             [1, q**3 - 1, -h*q*(q + 1), -h*q*(q - 1), -q*q*(q - 1)],
             [1, -1, h*q*(q*q - q - 1), h*q*(q*q - q + 1), -q*q*(q - 1)],
             [1, -1, -h*q*(q + 1), -h*q*(q - 1), q*q]]
        Q = [[1, q**3 - 1, q**3 - 1, (q + 1)*(q - 1)**2*c, q*q*(q - 1)**2*c],
             [1, -1, q**3 - 1, -(q*q - 1), -q*q*(q - 1)],
             [1, q*q - 1, -1, (q - 1)*(q*q - q - 1), -q*q*(q - 1)],
             [1, -(q*q + 1), -1, q**3 + 1, -q*q*(q - 1)],
             [1, -1, -1, -(q*q - 1), q*q]]
        return "ternary2_even", _table(P), _table(Q)
    raise ValueError(f"unknown family {family!r}")


def table_applies(family: str, q: int) -> bool:
    """hom3 tables are stated for q >= 5 or q a power of 3 above 3."""
    if family == "hom3":
        return q >= 5
    return True


@dataclass
class TableReport:
    table: str
    applicable: bool
    matched: bool
    permutation: list | None
    mismatch: str | None = None
    formally_self_dual: bool = False

    def to_json(self) -> dict:
        return {
            "matched_table": self.table if self.matched else None,
            "table": self.table,
            "applicable": self.applicable,
            "matched": self.matched,
            "permutation": self.permutation,
            "mismatch": self.mismatch,
            "formally_self_dual": self.formally_self_dual,
        }


def verify_closed_form(scheme: TranslationScheme, strict: bool = True) -> TableReport:
    """Match the enumerated (P, Q) against the closed form up to a row permutation.

    ``permutation[j]`` is the enumerated row equal to table row j; the columns
    of Q are permuted the same way. With ``strict`` a mismatch raises
    :class:`TableMismatch`, except where the table is not claimed to apply.
    """
    eig = scheme_eigenmatrices(scheme)
    name, TP, TQ = closed_form_tables(scheme.family, scheme.q)
    applicable = table_applies(scheme.family, scheme.q)
    fsd = eig.formally_self_dual

    def fail(msg):
        if strict and applicable:
            raise TableMismatch(msg)
        return TableReport(name, applicable, False, None, msg, fsd)

    perm = []
    for j, row in enumerate(TP):
        hits = [r for r, er in enumerate(eig.P) if er == row and r not in perm]
        if not hits:
            close = min(range(len(eig.P)), key=lambda r: sum(a != b for a, b in zip(eig.P[r], row)))
            col = next(i for i, (a, b) in enumerate(zip(eig.P[close], row)) if a != b)
            return fail(f"P table row {j} not found; nearest row {close} differs at column {col}: "
                        f"{eig.P[close][col]} vs {row[col]}")
        perm.append(hits[0])
    for i in range(len(TQ)):
        for j in range(len(TQ)):
            if eig.Q[i][perm[j]] != TQ[i][j]:
                return fail(f"Q entry ({i},{j}): enumerated {eig.Q[i][perm[j]]}, table {TQ[i][j]}")
    return TableReport(name, applicable, True, perm, None, fsd)


# intersection numbers -----------------------------------------------------------

@dataclass
class IntersectionNumbers:
    p: np.ndarray  # p[k, i, j]
    checked: list  # representatives examined per class
    exhaustive: bool


def intersection_numbers(scheme: TranslationScheme, full_limit: int = 10_000,
                         sample: int = 24) -> IntersectionNumbers:
    """p^k_ij with a constancy check over class members.

    Every member of every class is examined when |X| <= full_limit;
    otherwise an evenly spaced deterministic sample of each class.
    """
    d, q = scheme.d, scheme.q
    N = scheme.order
    allv = all_vectors(q, scheme.dim)
    lab = scheme.labels
    exhaustive = N <= full_limit
    p = np.zeros((d + 1, d + 1, d + 1), dtype=np.int64)
    checked = []
    for k in range(d + 1):
        members = np.flatnonzero(lab == k)
        if not exhaustive and len(members) > sample:
            members = members[np.linspace(0, len(members) - 1, sample).astype(np.int64)]
        checked.append(len(members))
        ref = None
        for y in members:
            other = lab[vector_index(q, scheme.field.vsub(allv[y][None, :], allv))]
            tab = np.bincount(lab * (d + 1) + other, minlength=(d + 1) ** 2).reshape(d + 1, d + 1)
            if ref is None:
                ref = tab
            elif not (tab == ref).all():
                raise NotConstant(f"p^{k}_ij depends on the representative of class {k}")
        p[k] = ref
        if not (ref == ref.T).all():
            raise NotConstant(f"p^{k} is not symmetric")
    return IntersectionNumbers(p, checked, exhaustive)


# bounds -------------------------------------------------------------------------

@dataclass(frozen=True)
class CliqueBound:
    bound: int
    complete: bool
    valency: int
    least_eigenvalue: int


def union_spectrum(scheme: TranslationScheme, relations) -> Spectrum:
    """Spectrum of the Cayley graph on the union of the given classes."""
    eig = scheme_eigenmatrices(scheme)
    R = _relations(scheme, relations)
    return Spectrum(tuple((sum(eig.P[j][i] for i in R), eig.multiplicities[j]) for j in range(scheme.d + 1)))


def _relations(scheme: TranslationScheme, relations) -> list[int]:
    R = sorted({int(str(r).lstrip("Rr")) for r in relations})
    if not R or any(not 1 <= i <= scheme.d for i in R):
        raise BadRelationSet(f"relations must be a nonempty subset of R1..R{scheme.d}")
    return R


def scheme_clique_bound(scheme: TranslationScheme, relations) -> CliqueBound:
    """floor(valency/|tau| + 1) for the union graph; |X| flagged complete for all classes."""
    spec = union_spectrum(scheme, relations)
    if len(_relations(scheme, relations)) == scheme.d:
        return CliqueBound(scheme.order, True, spec.largest, spec.smallest)
    return CliqueBound(delsarte_clique_bound(spec.largest, spec.smallest), False,
                       spec.largest, spec.smallest)


def scheme_report(scheme: TranslationScheme, verify: bool = False, relations=None) -> dict:
    eig = scheme_eigenmatrices(scheme)
    out = {
        "family": scheme.family,
        "q": scheme.q,
        "P": eig.P,
        "Q": eig.Q,
        "classes": scheme.valencies,
        "multiplicities": eig.multiplicities,
        "formally_self_dual": eig.formally_self_dual,
    }
    if verify:
        rep = verify_closed_form(scheme, strict=False)
        out.update(rep.to_json())
        if rep.applicable and not rep.matched:
            out["verified"] = False
        else:
            out["verified"] = rep.matched or not rep.applicable
    if relations:
        cb = scheme_clique_bound(scheme, relations)
        out["clique_bound"] = {"relations": [f"R{i}" for i in _relations(scheme, relations)],
                               "bound": cb.bound, "complete": cb.complete,
                               "valency": cb.valency, "least_eigenvalue": cb.least_eigenvalue}
    return out
