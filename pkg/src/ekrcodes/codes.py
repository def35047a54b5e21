"""Linear codes, extended Reed-Solomon codes, stars and the polynomial bridge.

Codewords are indexed by the lexicographic rank of their coefficient vector
v (the word is v^T G), which is also the canonical order of a family.
"""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from math import comb
from typing import NamedTuple

import numpy as np

from .config import check_cap
from .errors import (
    BadParameters,
    CodeMismatch,
    DegreeTooLarge,
    FieldMismatch,
    InconsistentConstraints,
    WeakEKRFails,
)
from .gf import GF, field_create, field_of_order, find_irreducible, poly_mul
from .pg import ProjPoint, all_vectors, canonical_rows, incidence, point_array, rank, vector_index


class LinearCode:
    """A k-dimensional code of length n over ``field`` given by a generator matrix."""

    def __init__(self, field: GF, G, *, ers: tuple[int, int] | None = None):
        G = np.array(G, dtype=np.int64)
        if G.ndim != 2 or G.shape[0] == 0:
            raise ValueError("generator matrix must be a nonempty 2-d array")
        if G.min() < 0 or G.max() >= field.q:
            raise ValueError("generator entries must be field codes")
        if rank(field, G.tolist()) != G.shape[0]:
            raise ValueError("generator rows are linearly dependent")
        G.flags.writeable = False
        self.field = field
        self.G = G
        self.ers = ers
        self._cache: dict = {}

    @property
    def k(self) -> int:
        return self.G.shape[0]

    @property
    def n(self) -> int:
        return self.G.shape[1]

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def size(self) -> int:
        return self.q**self.k

    def __eq__(self, other):
        return (
            isinstance(other, LinearCode)
            and self.field == other.field
            and self.G.shape == other.G.shape
            and bool((self.G == other.G).all())
        )

    def __hash__(self):
        return hash((self.field, self.G.tobytes(), self.G.shape))

    def __repr__(self):
        if self.ers:
            return f"ERS({self.ers[0]},{self.ers[1]})"
        return f"LinearCode([{self.n},{self.k}]_{self.q})"

    # enumeration ------------------------------------------------------------

    def coefficient_vectors(self, cap: int | None = None) -> np.ndarray:
        check_cap(self.size, cap, f"{self!r} codewords")
        if "coeffs" not in self._cache:
            arr = all_vectors(self.q, self.k)
            arr.flags.writeable = False
            self._cache["coeffs"] = arr
        return self._cache["coeffs"]

    def words(self, cap: int | None = None) -> np.ndarray:
        """All codewords, row r being the word of coefficient vector rank r."""
        if "words" not in self._cache:
            W = self.encode(self.coefficient_vectors(cap))
            W.flags.writeable = False
            self._cache["words"] = W
        return self._cache["words"]

    def encode(self, coeffs) -> np.ndarray:
        return self.field.matmul(np.atleast_2d(coeffs), self.G)

    def index_of(self, coeff) -> int:
        return int(vector_index(self.q, np.asarray(coeff))[()])

    def codeword(self, coeff) -> Codeword:
        coeff = tuple(int(c) for c in coeff)
        if len(coeff) != self.k:
            raise ValueError(f"expected {self.k} coefficients")
        word = tuple(self.encode(np.array(coeff))[0].tolist())
        return Codeword(self, coeff, word)

    def codeword_at(self, index: int) -> Codeword:
        digits, idx = [], int(index)
        for _ in range(self.k):
            idx, r = divmod(idx, self.q)
            digits.append(r)
        return self.codeword(digits[::-1])

    # geometry -------------------------------------------------------------

    @property
    def system(self) -> np.ndarray:
        """Canonical column points, shape (n, k)."""
        if "system" not in self._cache:
            S = canonical_rows(self.field, self.G.T)
            S.flags.writeable = False
            self._cache["system"] = S
        return self._cache["system"]

    def projective_system(self) -> list[ProjPoint]:
        return [ProjPoint(self.field, tuple(r)) for r in self.system.tolist()]

    def hyperplane_meets(self, cap: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """All hyperplane duals of PG(k-1,q) and |Pi cap S| for each."""
        if "meets" not in self._cache:
            duals = point_array(self.k, self.field, cap)
            counts = incidence(self.field, duals, self.system).sum(axis=1)
            self._cache["meets"] = (duals, counts)
        return self._cache["meets"]

    # serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "p": self.field.p,
            "h": self.field.h,
            "n": self.n,
            "k": self.k,
            "G": self.G.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> LinearCode:
        F = field_create(int(d["p"]), int(d["h"]))
        if F.q != int(d["q"]):
            raise ValueError("q does not equal p**h")
        code = cls(F, d["G"])
        if code.n != int(d["n"]) or code.k != int(d["k"]):
            raise ValueError("declared n/k do not match G")
        return code


@dataclass(frozen=True)
class Codeword:
    code: LinearCode
    coeff: tuple[int, ...]
    word: tuple[int, ...]

    @property
    def index(self) -> int:
        return self.code.index_of(self.coeff)

    def __eq__(self, other):
        return isinstance(other, Codeword) and self.code == other.code and self.coeff == other.coeff

    def __hash__(self):
        return hash((self.code, self.coeff))


class Family:
    """A set of codewords of one code, kept sorted by coefficient vector."""

    def __init__(self, code: LinearCode, indices):
        idx = np.unique(np.asarray(list(indices), dtype=np.int64))
        if len(idx) and (idx[0] < 0 or idx[-1] >= code.size):
            raise ValueError("codeword index out of range")
        idx.flags.writeable = False
        self.code = code
        self.indices = idx

    @classmethod
    def from_codewords(cls, codewords) -> Family:
        codewords = list(codewords)
        if not codewords:
            raise ValueError("empty family needs an explicit code")
        code = codewords[0].code
        for c in codewords:
            if c.code != code:
                raise CodeMismatch("family members from different codes")
        return cls(code, [c.index for c in codewords])

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return (self.code.codeword_at(int(i)) for i in self.indices)

    def __contains__(self, item):
        if isinstance(item, Codeword):
            if item.code != self.code:
                return False
            item = item.index
        pos = np.searchsorted(self.indices, item)
        return bool(pos < len(self.indices) and self.indices[pos] == item)

    def __eq__(self, other):
        return (
            isinstance(other, Family)
            and self.code == other.code
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.code, self.indices.tobytes()))

    def __repr__(self):
        return f"Family({self.code!r}, size={len(self)})"

    @property
    def coeffs(self) -> np.ndarray:
        return self.code.coefficient_vectors()[self.indices]

    @property
    def words(self) -> np.ndarray:
        return self.code.words()[self.indices]

    def members(self) -> list[Codeword]:
        return list(self)

    def translate(self, shift_index: int) -> Family:
        """The family c + c0 where c0 is the codeword with the given index."""
        F = self.code.field
        c0 = self.code.coefficient_vectors()[shift_index]
        return Family(self.code, vector_index(self.code.q, F.vadd(self.coeffs, c0[None, :])))

    def sort_key(self) -> tuple:
        return tuple(map(tuple, self.coeffs.tolist()))


# constructions -------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def ers_create(q: int, k: int) -> LinearCode:
    """Extended Reed-Solomon code: evaluations of polynomials of degree <= k."""
    F = field_of_order(q)
    if not 0 <= k < q:
        raise DegreeTooLarge(f"need 0 <= k < q, got k={k}, q={q}")
    xs = np.arange(q, dtype=np.int64)
    G = np.zeros((k + 1, q + 1), dtype=np.int64)
    for i in range(k + 1):
        G[i, :q] = F.vpow(xs, i)
    G[k, q] = 1
    return LinearCode(F, G, ers=(q, k))


def weight_distribution_enumerated(code: LinearCode, cap: int | None = None) -> list[int]:
    W = code.words(cap)
    weights = (W != 0).sum(axis=1)
    return np.bincount(weights, minlength=code.n + 1).tolist()


def mds_weight_distribution(n: int, k: int, q: int) -> list[int]:
    d = n - k + 1
    if d < 1:
        raise BadParameters("an MDS code needs n >= k")
    out = [0] * (n + 1)
    out[0] = 1
    for t in range(max(d, 1), n + 1):
        s = sum((-1) ** j * comb(t - 1, j) * q ** (t - d - j) for j in range(t - d + 1))
        out[t] = (q - 1) * comb(n, t) * s
    return out


def minimum_weight(code: LinearCode, cap: int | None = None) -> int:
    W = code.words(cap)
    weights = (W[1:] != 0).sum(axis=1)
    return int(weights.min()) if len(weights) else 0


def is_mds(code: LinearCode, cap: int | None = None) -> bool:
    return minimum_weight(code, cap) == code.n - code.k + 1


def is_projective(code: LinearCode) -> bool:
    cols = code.G.T
    if not (cols != 0).any(axis=1).all():
        return False
    S = canonical_rows(code.field, cols)
    return len({tuple(r) for r in S.tolist()}) == code.n


def agreements(c1: Codeword, c2: Codeword) -> int:
    if c1.code != c2.code:
        raise CodeMismatch("codewords from different codes")
    return sum(a == b for a, b in zip(c1.word, c2.word))


def intersects(c1: Codeword, c2: Codeword, t: int = 1) -> bool:
    return agreements(c1, c2) >= t


def t_star(code: LinearCode, positions, values, cap: int | None = None) -> Family:
    positions = [int(i) for i in positions]
    values = [int(a) for a in values]
    if len(positions) != len(values):
        raise BadParameters("positions and values differ in length")
    if len(set(positions)) != len(positions):
        raise BadParameters("positions must be distinct")
    if any(not 0 <= i < code.n for i in positions):
        raise BadParameters("position out of range")
    W = code.words(cap)
    mask = np.ones(len(W), dtype=bool)
    for i, a in zip(positions, values):
        mask &= W[:, i] == a
    if not mask.any():
        raise InconsistentConstraints(f"no codeword has values {values} at {positions}")
    return Family(code, np.flatnonzero(mask))


def star(code: LinearCode, i: int, alpha: int, cap: int | None = None) -> Family:
    return t_star(code, [i], [alpha], cap)


class Extension(NamedTuple):
    code: LinearCode
    added: list[ProjPoint]

    @property
    def extended(self) -> bool:
        return bool(self.added)


def extend_code(code: LinearCode, cap: int | None = None) -> Extension:
    """Append every point that lies on no hyperplane avoiding the system.

    Returns the code unchanged (``added == []``) when there is nothing to add.
    """
    duals, counts = code.hyperplane_meets(cap)
    M = duals[counts == 0]
    if len(M) == 0:
        raise WeakEKRFails("no hyperplane avoids the projective system")
    pts = point_array(code.k, code.field, cap)
    covered = incidence(code.field, M, pts).any(axis=0)
    have = {tuple(r) for r in code.system.tolist()}
    new = [tuple(r) for r in pts[~covered].tolist() if tuple(r) not in have]
    if not new:
        return Extension(code, [])
    G = np.concatenate([code.G, np.array(new, dtype=np.int64).T], axis=1)
    ext = LinearCode(code.field, G)
    if code.size <= (cap or 1 << 16):
        # full-weight words must stay full weight on the new coordinates
        W = ext.words()
        full = (W[:, : code.n] != 0).all(axis=1)
        if not (W[full] != 0).all():
            raise RuntimeError("extension changed the intersection relation")
    return Extension(ext, [ProjPoint(code.field, p) for p in new])


def mds_subcode_coefficients(code: LinearCode, t: int) -> np.ndarray:
    """Coefficient vectors of f X^j, j < t, with f the smallest irreducible of degree k+1-t."""
    if code.ers is None:
        raise BadParameters("mds_subcode needs an extended Reed-Solomon code")
    q, k = code.ers
    if not 1 <= t <= k - 1:
        raise BadParameters(f"need 1 <= t <= k-1 so that deg f = k+1-t >= 2, got t={t}, k={k}")
    F = code.field
    f = find_irreducible(F, k + 1 - t)
    rows = []
    for j in range(t):
        g = poly_mul(F, f, [0] * j + [1])
        rows.append(g + [0] * (k + 1 - len(g)))
    return np.array(rows, dtype=np.int64)


def mds_subcode(code: LinearCode, t: int) -> LinearCode:
    """[q+1, t] MDS subcode of ERS(q,k) spanned by Ev(f X^j), j < t.

    f is the smallest irreducible of degree k+1-t >= 2. A word f*g with
    deg g <= t-1 vanishes only at roots of g and, if deg g < t-1, at
    infinity, so it has at most t-1 zeros.
    """
    sub = LinearCode(code.field, code.encode(mds_subcode_coefficients(code, t)))
    if not is_mds(sub):
        raise RuntimeError("subcode is not MDS")
    return sub


# the polynomial bridge ----------------------------------------------------

INFINITY = "inf"


@dataclass(frozen=True)
class HomPoly:
    """f = sum a_i X^i of formal degree k, i.e. the form sum a_i X^i Y^(k-i)."""

    field: GF
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("HomPoly needs at least one coefficient")

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, x):
        if x == INFINITY:
            return self.coeffs[-1]
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, int(x)), c)
        return acc

    def __sub__(self, other: HomPoly) -> HomPoly:
        if self.field != other.field or self.k != other.k:
            raise FieldMismatch("polynomials from different spaces")
        return HomPoly(self.field, [self.field.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)])


def poly_to_word(f: HomPoly, q: int | None = None) -> Codeword:
    q = f.field.q if q is None else q
    if q != f.field.q:
        raise FieldMismatch(f"polynomial over GF({f.field.q}), asked for q={q}")
    if f.k >= q:
        raise DegreeTooLarge(f"degree {f.k} needs q > {f.k}")
    return ers_create(q, f.k).codeword(f.coeffs)


def word_to_poly(c: Codeword) -> HomPoly:
    if c.code.ers is None:
        raise CodeMismatch("word_to_poly needs an extended Reed-Solomon codeword")
    return HomPoly(c.code.field, c.coeff)
