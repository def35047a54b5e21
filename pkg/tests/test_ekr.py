import itertools
from fractions import Fraction

import numpy as np
import pytest

from ekrcodes.codes import Family, LinearCode, ers_create, extend_code, star, t_star
from ekrcodes.ekr import (
    WeakEKR,
    contained_in_star,
    delsarte_clique_bound,
    ekr_report,
    is_intersecting_family,
    is_star,
    module_property_check,
    strict_condition_check,
    t_int_upper_bound,
    weak_ekr_check,
)
from ekrcodes.errors import BadParameters, BadSpectrum
from ekrcodes.gf import field_of_order
from ekrcodes.pg import enumerate_hyperplanes, enumerate_points, incident, ProjPoint
from ekrcodes.schemes import closed_form_tables
from ekrcodes.spectral import hm_family


def _module_oracle(code):
    """First off-system point lying on no avoiding hyperplane, by plain incidence."""
    F = code.field
    S = {ProjPoint(F, tuple(c)) for c in code.system.tolist()}
    dim = code.k
    M = [H for H in enumerate_hyperplanes(dim, F) if not any(incident(P, H) for P in S)]
    for P in enumerate_points(dim, F):
        if P not in S and not any(incident(P, H) for H in M):
            return False, P
    return True, None


def _line_plus_point(q):
    """All points of z = 0 in PG(2,q) plus (0:0:1): every line meets it."""
    F = field_of_order(q)
    cols = [P.coords for P in enumerate_points(3, F) if P.coords[2] == 0] + [(0, 0, 1)]
    return LinearCode(F, np.array(cols).T.tolist())


def test_weak_ekr_holds():
    res = weak_ekr_check(ers_create(5, 2))
    assert res.status is WeakEKR.HOLDS and res.max_family_size == 25


@pytest.mark.parametrize("q", [3, 4])
def test_all_intersecting_fixture(q):
    code = _line_plus_point(q)
    res = weak_ekr_check(code)
    assert res.status is WeakEKR.ALL_INTERSECTING and res.max_family_size == q**3
    whole = Family(code, range(code.size))
    assert is_intersecting_family(whole, 1)


def test_module_property_examples():
    ok, witness = module_property_check(ers_create(4, 2))
    assert not ok and str(witness) == "(0:1:0)"
    assert module_property_check(ers_create(5, 2)) == (True, None)


@pytest.mark.parametrize("q,k", [(4, 3), (5, 3), (7, 3), (8, 3), (5, 4)])
def test_module_property_holds_in_dimension_at_least_four(q, k):
    assert module_property_check(ers_create(q, k))[0]


@pytest.mark.parametrize("q,k", [(3, 2), (4, 2), (5, 2), (8, 2), (4, 3)])
def test_module_property_matches_incidence_oracle(q, k):
    assert module_property_check(ers_create(q, k)) == _module_oracle(ers_create(q, k))


@pytest.mark.parametrize("q", [4, 8, 16])
def test_nucleus_is_the_only_uncovered_point(q):
    code = ers_create(q, 2)
    from ekrcodes.spectral import incidence_profile

    prof = incidence_profile(code, {0})
    zero = np.flatnonzero((~prof.on_system) & (prof.counts == 0))
    assert [tuple(prof.points[z].tolist()) for z in zero] == [(0, 1, 0)]


@pytest.mark.parametrize("q,k", [(4, 2), (8, 2), (3, 2), (5, 2)])
def test_extension_restores_module_property(q, k):
    code = ers_create(q, k)
    assert weak_ekr_check(code).status is WeakEKR.HOLDS
    assert module_property_check(extend_code(code).code)[0]


def test_strict_condition_collinear_fixture():
    F = field_of_order(5)
    code = LinearCode(F, [[1, 0, 1, 0], [0, 1, 1, 0], [0, 0, 0, 1]])
    res = strict_condition_check(code)
    assert not res.holds and res.reason == "collinear" and not res.no_three_collinear


def test_strict_condition_zero_count_point():
    res = strict_condition_check(ers_create(4, 2))
    # the nucleus has m_P = 0, so (q m_P - |M|)^2 min(n,(q-1)^2) = |M|^2 min(5, 9) > |M|^2
    assert not res.holds and res.reason == "deviation"
    assert res.witness.coords == (0, 1, 0)
    assert res.worst_margin == 1 - 5


@pytest.mark.parametrize("q,k", [(7, 3), (5, 2), (7, 2), (8, 3)])
def test_strict_margin_matches_direct_evaluation(q, k):
    from ekrcodes.spectral import incidence_profile

    code = ers_create(q, k)
    res = strict_condition_check(code)
    prof = incidence_profile(code, {0})
    M, n = prof.size_M, code.n
    f = min(n, (q - 1) ** 2)
    margins = [1 - Fraction((q * int(c) - M) ** 2 * f, M * M)
               for c, on in zip(prof.counts.tolist(), prof.on_system.tolist()) if not on]
    assert res.worst_margin == min(margins)
    assert res.holds == (res.no_three_collinear and min(margins) > 0)
    assert res.no_three_collinear


def test_report_json():
    rep = ekr_report(ers_create(4, 2)).to_json()
    assert rep["weak"] == "Holds" and rep["module"] is False and rep["witness"] == "(0:1:0)"
    assert rep["max_family_size"] == 16
    rep5 = ekr_report(ers_create(5, 2))
    # module property implies the weak property
    assert rep5.module and rep5.weak is WeakEKR.HOLDS


def test_t_int_bounds():
    # q^(k+1-t) with q=5, k=3, t=2
    assert t_int_upper_bound(5, 3, 2) == (25, False)
    value, strict = t_int_upper_bound(5, 3, 3)
    assert strict and value == Fraction(24, 3) + 1 == 9
    for q, k in [(5, 2), (7, 3), (9, 4)]:
        assert t_int_upper_bound(q, k, 1)[0] == q**k
    with pytest.raises(BadParameters):
        t_int_upper_bound(5, 5, 2)
    with pytest.raises(BadParameters):
        t_int_upper_bound(5, 1, 1)
    with pytest.raises(BadParameters):
        t_int_upper_bound(5, 3, 4)


@pytest.mark.parametrize("q,k,t", [(5, 3, 2), (5, 3, 1), (7, 3, 2), (7, 4, 2)])
def test_t_stars_attain_t_int_bound(q, k, t):
    fam = t_star(ers_create(q, k), list(range(t)), [0] * t)
    assert len(fam) == t_int_upper_bound(q, k, t)[0]
    assert is_intersecting_family(fam, t)


def test_delsarte_examples():
    q = 9
    valency = (q - 1) ** 2 * q * (q + 1) // 6
    tau = Fraction(-q * (3 * q - 1), 6)
    assert (valency, tau) == (960, -39)
    assert delsarte_clique_bound(valency, tau) == 25 == Fraction(q * q, 3) - Fraction(2 * q, 9)
    assert delsarte_clique_bound(7, -7) == 2
    with pytest.raises(BadSpectrum):
        delsarte_clique_bound(7, 0)


def test_delsarte_plug_in_q27():
    _, P, _ = closed_form_tables("hom3", 27)
    valency = P[0][3]
    tau = min(row[3] for row in P)
    assert (valency, tau) == (85176, -360)
    assert delsarte_clique_bound(valency, tau) == 237 == 729 // 3 - 6


def test_star_predicates():
    code = ers_create(5, 2)
    assert is_star(star(code, 0, 0)) == (0, 0)
    assert is_star(star(code, 3, 2)) == (3, 2)
    c = code.codeword([1, 2, 3])
    single = Family(code, [code.index_of([1, 2, 3])])
    assert contained_in_star(single) == (0, c.word[0])
    assert is_star(single) is None


def test_hm_family_predicates():
    code = ers_create(5, 2)
    fam = hm_family(code, 0, 0, code.codeword([1, 0, 0]))
    assert contained_in_star(fam) is None
    assert is_intersecting_family(fam, 1)


def test_intersection_monotone_in_t():
    code = ers_create(5, 3)
    for fam in (t_star(code, [0, 1], [1, 1]), star(code, 2, 0), t_star(code, [0, 1, 2], [0, 1, 2])):
        for t in range(1, 4):
            if is_intersecting_family(fam, t + 1):
                assert is_intersecting_family(fam, t)


def test_is_intersecting_agrees_with_pairwise_loop():
    code = ers_create(4, 2)
    rng = np.random.default_rng(7)
    for _ in range(20):
        idx = rng.choice(code.size, size=6, replace=False)
        fam = Family(code, idx)
        W = fam.words
        want = min(int((a == b).sum()) for a, b in itertools.combinations(W, 2))
        for t in (1, 2):
            assert is_intersecting_family(fam, t) == (want >= t)
