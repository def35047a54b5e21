"""Exact maximum t-intersecting families by branch and bound.

Two codewords are compatible when they agree in at least t positions, and a
t-intersecting family is a clique of the compatibility graph. The graph is a
Cayley graph on the coefficient space, so some maximum clique contains the
zero codeword and the search only explores its neighbourhood. Nodes are
bounded by greedy colouring and, when available, by a fixed partition of the
code into cosets of an [n, t] MDS subcode (each coset holds at most one
member of a t-intersecting family). Candidate sets are Python int bitsets.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .codes import Family, LinearCode, mds_subcode_coefficients, star, t_star
from .config import CONFIG, check_cap
from .ekr import contained_in_star, is_intersecting_family, is_star
from .errors import BadParameters, InconsistentConstraints, ModulePropertyFails, VerificationFailed
from .pg import vector_index
from .spectral import eml_holds, few_or_many_bound, hm_family, incidence_profile, more_than_few_bound


@dataclass
class SearchResult:
    code: LinearCode
    t: int
    max_size: int
    witness: Family
    node_count: int
    elapsed: float
    proven: bool = True
    census: list | None = None

    def certificate(self) -> dict:
        """Size, t and member coefficient vectors; ``k`` is the polynomial degree."""
        degree = self.code.ers[1] if self.code.ers is not None else self.code.k - 1
        return {
            "q": self.code.q,
            "k": degree,
            "dim": self.code.k,
            "t": self.t,
            "size": self.max_size,
            "family": self.witness.coeffs.tolist(),
        }


class _Timeout(Exception):
    pass


def _bits(mask: np.ndarray) -> int:
    packed = np.packbits(mask.astype(bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def compatible_mask(code: LinearCode, t: int) -> np.ndarray:
    """Coefficient vectors v != 0 whose word has at least t zeros."""
    W = code.words()
    mask = (W == 0).sum(axis=1) >= t
    mask[0] = False
    return mask


def _coset_labels(code: LinearCode, members: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Smallest index in each member's coset of the span of ``basis``."""
    F = code.field
    C = code.coefficient_vectors()[members]
    k = len(basis)
    combos = np.array(np.meshgrid(*[np.arange(code.q)] * k, indexing="ij")).reshape(k, -1).T
    span = F.matmul(combos, basis) if k else np.zeros((1, code.k), dtype=np.int64)
    best = None
    for vec in span:
        idx = vector_index(code.q, F.vadd(C, vec[None, :]))
        best = idx if best is None else np.minimum(best, idx)
    return best


def _partition_basis(code: LinearCode, t: int) -> np.ndarray | None:
    if t == 1:
        W = code.words()
        full = np.flatnonzero((W != 0).all(axis=1))
        if not len(full):
            return None
        return code.coefficient_vectors()[full[:1]]
    if code.ers is not None and t <= code.ers[1] - 1:
        return mds_subcode_coefficients(code, t)
    return None


class _Searcher:
    def __init__(self, adj: list[int], classes: list[int], deadline: float | None):
        self.adj = adj
        self.classes = classes
        self.deadline = deadline
        self.nodes = 0

    def colour_order(self, P: int) -> list[tuple[int, int]]:
        adj = self.adj
        out = []
        colour = 0
        U = P
        while U:
            colour += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~adj[v]
                Q ^= low
                U ^= low
                out.append((v, colour))
        return out

    def partition_bound(self, P: int) -> int:
        return sum(1 for c in self.classes if c & P) if self.classes else 1 << 30

    def tick(self):
        self.nodes += 1
        if self.deadline is not None and self.nodes % 512 == 0 and time.monotonic() > self.deadline:
            raise _Timeout

    def maximum(self, P: int, base: int, best: int):
        """Largest clique in P strictly bigger than best - base, or None."""
        self.best = best
        self.best_clique = None
        self._max([], P, base)
        return self.best, self.best_clique

    def _max(self, C: list[int], P: int, base: int):
        self.tick()
        if base + len(C) + self.partition_bound(P) <= self.best:
            return
        order = self.colour_order(P)
        for v, colour in reversed(order):
            if base + len(C) + colour <= self.best:
                return
            C.append(v)
            NP = P & self.adj[v]
            if NP:
                self._max(C, NP, base)
            elif base + len(C) > self.best:
                self.best = base + len(C)
                self.best_clique = list(C)
            C.pop()
            P &= ~(1 << v)

    def all_of_size(self, P: int, need: int) -> list[list[int]]:
        self.found = []
        self._all([], P, need)
        return self.found

    def _all(self, C: list[int], P: int, need: int):
        self.tick()
        if len(C) == need:
            self.found.append(list(C))
            return
        if len(C) + self.partition_bound(P) < need:
            return
        order = self.colour_order(P)
        for v, colour in reversed(order):
            if len(C) + colour < need:
                return
            C.append(v)
            self._all(C, P & self.adj[v], need)
            C.pop()
            P &= ~(1 << v)


def _prepare(code: LinearCode, t: int):
    conn = compatible_mask(code, t)
    cand = np.flatnonzero(conn)
    F = code.field
    C = code.coefficient_vectors()
    Cc = C[cand]
    m = len(cand)
    adj = []
    rows = max(1, (1 << 22) // max(1, m * code.k))
    for s in range(0, m, rows):
        idx = vector_index(code.q, F.vsub(Cc[None, :, :], Cc[s:s + rows, None, :]))
        block = conn[idx]
        adj.extend(_bits(r) for r in block)
    classes = []
    basis = _partition_basis(code, t)
    if basis is not None and m:
        labels = _coset_labels(code, cand, basis)
        for lab in np.unique(labels):
            classes.append(_bits(labels == lab))
    return cand, adj, classes


def _seed(code: LinearCode, t: int) -> Family:
    """Largest t-star through the zero codeword on the first positions tried."""
    best = Family(code, [0])
    for start in range(code.n - t + 1):
        try:
            fam = t_star(code, list(range(start, start + t)), [0] * t)
        except InconsistentConstraints:
            continue
        if len(fam) > len(best):
            best = fam
    return best


def max_intersecting_family(code: LinearCode, t: int = 1, timeout: float | None = None,
                            cap: int | None = None) -> SearchResult:
    """Maximum t-intersecting family, proven optimal unless the timeout fires."""
    if not 1 <= t <= code.n:
        raise BadParameters("need 1 <= t <= n")
    check_cap(code.size, cap if cap is not None else CONFIG.search_cap, "search")
    start = time.monotonic()
    cand, adj, classes = _prepare(code, t)
    seed = _seed(code, t)
    s = _Searcher(adj, classes, None if timeout is None else start + timeout)
    proven = True
    try:
        best, clique = s.maximum((1 << len(cand)) - 1, 1, len(seed))
    except _Timeout:
        best, clique, proven = s.best, s.best_clique, False
    witness = seed if clique is None else Family(code, [0] + cand[clique].tolist())
    if not is_intersecting_family(witness, t) or len(witness) != best:
        raise VerificationFailed("search witness failed verification")
    return SearchResult(code, t, best, witness, s.nodes, time.monotonic() - start, proven)


def classify_family(code: LinearCode, fam: Family) -> str:
    if is_star(fam) is not None:
        return "star"
    if contained_in_star(fam) is not None:
        return "contained_in_star"
    if code.ers is not None and code.ers[1] == 2 and len(fam) == code.q**2:
        b = fam.coeffs[:, 1]
        if (b == b[0]).all():
            return "b_line"
    if _is_hm(code, fam):
        return "hm"
    return "other"


def _is_hm(code: LinearCode, fam: Family) -> bool:
    W = fam.words
    for apex in range(len(fam)):
        rest = np.delete(W, apex, axis=0)
        if not len(rest):
            continue
        for i in range(code.n):
            a = rest[0, i]
            if (rest[:, i] == a).all() and W[apex, i] != a:
                c = code.codeword_at(int(fam.indices[apex]))
                if hm_family(code, i, int(a), c) == fam:
                    return True
    return False


def classify_maximum_families(code: LinearCode, t: int = 1, timeout: float | None = None,
                              cap: int | None = None) -> SearchResult:
    """All maximum t-intersecting families, each tagged.

    Families through the zero codeword are enumerated exactly; every other
    maximum family is a translate of one of them.
    """
    check_cap(code.size, cap if cap is not None else CONFIG.census_cap, "census")
    start = time.monotonic()
    res = max_intersecting_family(code, t, timeout=timeout, cap=cap)
    if not res.proven:
        return res
    cand, adj, classes = _prepare(code, t)
    s = _Searcher(adj, classes, None if timeout is None else start + timeout)
    try:
        through_zero = s.all_of_size((1 << len(cand)) - 1, res.max_size - 1)
    except _Timeout:
        res.proven = False
        return res
    F = code.field
    C = code.coefficient_vectors()
    seen = {}
    for clique in through_zero:
        members = np.array([0] + cand[clique].tolist())
        base = C[members]
        for g in range(code.size):
            idx = np.sort(vector_index(code.q, F.vadd(base, C[g][None, :])))
            key = idx.tobytes()
            if key not in seen:
                seen[key] = Family(code, idx)
    fams = sorted(seen.values(), key=Family.sort_key)
    res.census = [(f, classify_family(code, f)) for f in fams]
    res.witness = fams[0]
    res.node_count += s.nodes
    res.elapsed = time.monotonic() - start
    return res


def verify_star_absorption(code: LinearCode, fam: Family) -> dict:
    """Per-star intersection sizes; any star holding more than q^(k-1) - |M|
    members must contain the whole family."""
    threshold = code.q ** (code.k - 1) - incidence_profile(code, {0}).size_M
    W = fam.words
    profile = {}
    for i in range(code.n):
        for a in range(code.q):
            x = int((W[:, i] == a).sum())
            profile[(i, a)] = x
            if x > threshold and x != len(fam):
                raise VerificationFailed(
                    f"star ({i},{a}) holds {x} > {threshold} members but not the whole family"
                )
    return profile


@dataclass
class FamilyChecks:
    few_or_many: bool
    expander_mixing: bool
    absorption: bool
    more_than_few: bool | None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.few_or_many and self.expander_mixing and self.absorption and self.more_than_few is not False


def family_checks(code: LinearCode, fam: Family) -> FamilyChecks:
    """Exact star-interaction inequalities for an intersecting family."""
    W = fam.words
    q, k = code.q, code.k
    bounds = {i: few_or_many_bound(code, i) for i in range(code.n)}
    few = eml = True
    best_star = 0
    for i in range(code.n):
        for a in range(q):
            s = int((W[:, i] == a).sum())
            best_star = max(best_star, s)
            t = len(fam) - s
            if s * t > bounds[i]:
                few = False
            if not eml_holds(code, i, s, t, 0):
                eml = False
    try:
        verify_star_absorption(code, fam)
        absorbed = True
    except VerificationFailed:
        absorbed = False
    mtf = None
    if len(fam) == q ** (k - 1):
        try:
            mtf = Fraction(best_star) >= more_than_few_bound(code, len(fam))
        except ModulePropertyFails:
            mtf = None
    return FamilyChecks(few, eml, absorbed, mtf, {"largest_star_intersection": best_star})


def load_certificate(data: dict, code: LinearCode) -> Family:
    fam = data["family"]
    if not isinstance(fam, list) or int(data.get("dim", code.k)) != code.k:
        raise VerificationFailed("certificate does not describe this code")
    if any(len(c) != code.k for c in fam):
        raise VerificationFailed("certificate rows have the wrong length")
    if any(not 0 <= int(x) < code.q for c in fam for x in c):
        raise VerificationFailed("certificate entries are not field codes")
    idx = vector_index(code.q, np.array(fam, dtype=np.int64)).tolist() if fam else []
    if len(set(idx)) != len(idx):
        raise VerificationFailed("certificate repeats a codeword")
    return Family(code, idx)


def verify_certificate(data: dict, code: LinearCode) -> Family:
    fam = load_certificate(data, code)
    if len(fam) != int(data["size"]):
        raise VerificationFailed(f"certificate claims size {data['size']} but lists {len(fam)}")
    if not is_intersecting_family(fam, int(data.get("t", 1))):
        raise VerificationFailed("certificate family is not t-intersecting")
    return fam
