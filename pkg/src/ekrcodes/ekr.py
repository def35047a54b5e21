"""Checkers for the weak, module and strict EKR properties, and related bounds."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .codes import Family, LinearCode
from .errors import BadParameters, BadSpectrum
from .pg import ProjPoint, rank
from .spectral import incidence_profile

__all__ = [
    "Family",
    "WeakEKR",
    "WeakResult",
    "EkrReport",
    "weak_ekr_check",
    "module_property_check",
    "strict_condition_check",
    "ekr_report",
    "t_int_upper_bound",
    "delsarte_clique_bound",
    "is_intersecting_family",
    "is_star",
    "contained_in_star",
]


class WeakEKR(enum.Enum):
    ALL_INTERSECTING = "AllIntersecting"
    HOLDS = "Holds"


@dataclass(frozen=True)
class WeakResult:
    status: WeakEKR
    max_family_size: int


def weak_ekr_check(code: LinearCode, cap: int | None = None) -> WeakResult:
    """Stars are maximum iff some hyperplane avoids the projective system.

    With no such hyperplane every two codewords meet and the whole code is
    the maximum family.
    """
    prof = incidence_profile(code, {0}, cap)
    if prof.size_M == 0:
        return WeakResult(WeakEKR.ALL_INTERSECTING, code.size)
    return WeakResult(WeakEKR.HOLDS, code.q ** (code.k - 1))


def module_property_check(code: LinearCode, cap: int | None = None) -> tuple[bool, ProjPoint | None]:
    """True iff every point off the system lies on an avoiding hyperplane.

    On failure the first such point in canonical order is returned.
    """
    prof = incidence_profile(code, {0}, cap)
    bad = np.flatnonzero((~prof.on_system) & (prof.counts == 0))
    if len(bad) == 0:
        return True, None
    return False, ProjPoint(code.field, tuple(prof.points[bad[0]].tolist()))


@dataclass(frozen=True)
class StrictResult:
    holds: bool
    reason: str
    no_three_collinear: bool
    worst_margin: Fraction | None
    witness: ProjPoint | None

    def __bool__(self):
        return self.holds


def strict_condition_check(code: LinearCode, cap: int | None = None) -> StrictResult:
    """Sufficient condition for stars to be the only maximum families.

    Needs no three collinear system points and, for every P off the system,
    (q m_P - |M|)^2 * min(n, (q-1)^2) < |M|^2. The margin reported is
    1 - (q m_P - |M|)^2 min(n,(q-1)^2) / |M|^2 at the worst point, so a
    positive margin means the inequality holds there.
    """
    S = code.system.tolist()
    collinear_ok = all(rank(code.field, trio) == 3 for trio in combinations(S, 3))
    prof = incidence_profile(code, {0}, cap)
    M, q, n = prof.size_M, code.q, code.n
    if M == 0:
        return StrictResult(False, "no avoiding hyperplane", collinear_ok, None, None)
    factor = min(n, (q - 1) ** 2)
    off = np.flatnonzero(~prof.on_system)
    worst, witness = None, None
    for pos in off.tolist():
        dev = q * int(prof.counts[pos]) - M
        margin = 1 - Fraction(dev * dev * factor, M * M)
        if worst is None or margin < worst:
            worst, witness = margin, pos
    wpt = None if witness is None else ProjPoint(code.field, tuple(prof.points[witness].tolist()))
    if not collinear_ok:
        return StrictResult(False, "collinear", False, worst, wpt)
    if worst is not None and worst <= 0:
        return StrictResult(False, "deviation", True, worst, wpt)
    return StrictResult(True, "ok", True, worst, wpt)


@dataclass
class EkrReport:
    weak: WeakEKR
    max_family_size: int
    module: bool
    module_witness: ProjPoint | None
    strict_condition: bool
    strict_margin: Fraction | None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "weak": self.weak.value,
            "max_family_size": self.max_family_size,
            "module": self.module,
            "witness": None if self.module_witness is None else str(self.module_witness),
            "strict_condition": self.strict_condition,
            "strict_margin": None if self.strict_margin is None else str(self.strict_margin),
            "notes": list(self.notes),
        }


def ekr_report(code: LinearCode, cap: int | None = None) -> EkrReport:
    weak = weak_ekr_check(code, cap)
    module, witness = module_property_check(code, cap)
    strict = strict_condition_check(code, cap)
    notes = []
    if weak.status is WeakEKR.ALL_INTERSECTING:
        notes.append("no avoiding hyperplane: the whole code is intersecting")
    if not strict.holds:
        notes.append(f"strict condition fails: {strict.reason}")
    return EkrReport(weak.status, weak.max_family_size, module, witness,
                     strict.holds, strict.worst_margin, notes)


def t_int_upper_bound(q: int, k: int, t: int) -> tuple[Fraction, bool]:
    """Upper bound on t-intersecting families of polynomials of degree <= k.

    Returns (value, strict). For t < k the t-stars attain q^(k+1-t). For
    t = k every family has size strictly below (q^2-1)/k + 1.
    """
    if not (1 <= t <= k < q and k >= 2):
        raise BadParameters("need 1 <= t <= k < q and k >= 2")
    if t < k:
        return Fraction(q ** (k + 1 - t)), False
    return Fraction(q * q - 1, k) + 1, True


def delsarte_clique_bound(valency, min_eigenvalue) -> int:
    """floor(valency/|tau| + 1) for the least eigenvalue tau < 0."""
    tau = Fraction(min_eigenvalue)
    if tau >= 0:
        raise BadSpectrum("least eigenvalue must be negative")
    return int(Fraction(valency) / -tau + 1)


def _pairwise_min_agreement(W: np.ndarray, chunk: int = 1 << 22) -> int:
    N, n = W.shape
    if N < 2:
        return n
    rows = max(1, chunk // max(1, N * n))
    best = n
    for s in range(0, N, rows):
        agree = (W[s:s + rows, None, :] == W[None, :, :]).sum(axis=2)
        for r in range(agree.shape[0]):
            agree[r, s + r] = n
        best = min(best, int(agree.min()))
    return best


def is_intersecting_family(fam: Family, t: int = 1) -> bool:
    return _pairwise_min_agreement(fam.words) >= t


def _star_scan(fam: Family):
    W = fam.words
    q = fam.code.q
    for i in range(fam.code.n):
        for a in range(q):
            if len(W) and (W[:, i] == a).all():
                yield i, a


def contained_in_star(fam: Family) -> tuple[int, int] | None:
    """First (i, alpha) in canonical order whose star contains the family."""
    return next(_star_scan(fam), None)


def is_star(fam: Family) -> tuple[int, int] | None:
    """(i, alpha) if the family is exactly a star."""
    words = fam.code.words()
    for i, a in _star_scan(fam):
        if int((words[:, i] == a).sum()) == len(fam):
            return i, a
    return None
