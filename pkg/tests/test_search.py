import json

import numpy as np
import pytest

from ekrcodes.codes import Family, LinearCode, ers_create, star, t_star
from ekrcodes.ekr import is_intersecting_family, t_int_upper_bound
from ekrcodes.errors import TooLarge, VerificationFailed
from ekrcodes.gf import field_of_order
from ekrcodes.search import (
    classify_family,
    classify_maximum_families,
    family_checks,
    load_certificate,
    max_intersecting_family,
    verify_certificate,
    verify_star_absorption,
)
from ekrcodes.spectral import gamma_T_spectrum, hm_family, hoffman_bound, incidence_profile


def _maximum_cliques(code, t):
    """Oracle: all maximum cliques of the t-agreement graph by plain Bron-Kerbosch."""
    W = code.words()
    agree = (W[:, None, :] == W[None, :, :]).sum(axis=2) >= t
    N = len(W)
    nbr = [set(np.flatnonzero(agree[v]).tolist()) - {v} for v in range(N)]
    found = []

    def bk(R, P, X):
        if not P and not X:
            found.append(R)
            return
        u = max(P | X, key=lambda w: len(nbr[w] & P))
        for v in list(P - nbr[u]):
            bk(R | {v}, P & nbr[v], X & nbr[v])
            P = P - {v}
            X = X | {v}

    bk(frozenset(), set(range(N)), set())
    best = max(len(c) for c in found)
    return best, {tuple(sorted(c)) for c in found if len(c) == best}


@pytest.mark.parametrize("q,k,want", [(3, 2, 9), (4, 2, 16), (5, 2, 25), (4, 3, 64)])
def test_maximum_family_size(q, k, want):
    code = ers_create(q, k)
    res = max_intersecting_family(code)
    assert res.max_size == want and res.proven
    assert is_intersecting_family(res.witness, 1)
    assert res.max_size == hoffman_bound(gamma_T_spectrum(code, {0}), code.size)


@pytest.mark.parametrize("q", [3, 4])
def test_maximum_matches_clique_oracle(q):
    code = ers_create(q, 2)
    best, cliques = _maximum_cliques(code, 1)
    res = classify_maximum_families(code)
    assert res.max_size == best
    assert {tuple(f.indices.tolist()) for f, _ in res.census} == cliques


def test_t_equals_k_hom2_f5():
    code = ers_create(5, 2)
    res = max_intersecting_family(code, t=2)
    assert 7 <= res.max_size < 13
    assert res.max_size < t_int_upper_bound(5, 2, 2)[0]
    best, _ = _maximum_cliques(code, 2)
    assert res.max_size == best
    assert is_intersecting_family(res.witness, 2)


def test_t_equals_k_hom3_f5():
    res = max_intersecting_family(ers_create(5, 3), t=3)
    assert res.max_size < 9
    assert is_intersecting_family(res.witness, 3)


def test_t_below_k_reaches_t_star():
    res = max_intersecting_family(ers_create(4, 3), t=2)
    assert res.max_size == t_int_upper_bound(4, 3, 2)[0] == 16


def test_census_hom2_q3_and_q5_only_stars():
    for q in (3, 5):
        res = classify_maximum_families(ers_create(q, 2))
        tags = [tag for _, tag in res.census]
        assert set(tags) == {"star"}
        assert len(tags) == (q + 1) * q


def test_census_hom2_q4_has_b_line_families():
    code = ers_create(4, 2)
    res = classify_maximum_families(code)
    tags = [tag for _, tag in res.census]
    assert tags.count("star") == 5 * 4
    assert tags.count("b_line") == 4
    assert set(tags) == {"star", "b_line"}
    for fam, tag in res.census:
        if tag == "b_line":
            # a X^2 + b XY + c Y^2 with b fixed and a, c free
            b = fam.coeffs[:, 1]
            assert (b == b[0]).all()
            assert {(int(r[0]), int(r[2])) for r in fam.coeffs} == {(a, c) for a in range(4) for c in range(4)}


def test_census_translation_closed():
    code = ers_create(4, 2)
    res = classify_maximum_families(code)
    census = {tuple(f.indices.tolist()) for f, _ in res.census}
    for fam, _ in res.census[::3]:
        for g in (1, 17, 42):
            assert tuple(fam.translate(g).indices.tolist()) in census


def test_search_is_deterministic():
    code = ers_create(4, 2)
    a = max_intersecting_family(code)
    b = max_intersecting_family(code)
    assert a.max_size == b.max_size and a.witness == b.witness and a.node_count == b.node_count
    c = classify_maximum_families(code)
    d = classify_maximum_families(code)
    assert c.witness == d.witness == c.census[0][0]
    assert c.witness.sort_key() == min(f.sort_key() for f, _ in c.census)


def test_classify_family_tags():
    code = ers_create(5, 2)
    assert classify_family(code, star(code, 1, 2)) == "star"
    assert classify_family(code, t_star(code, [0, 1], [0, 0])) == "contained_in_star"
    hm = hm_family(code, 0, 0, code.codeword([1, 0, 0]))
    assert classify_family(code, hm) == "hm"
    W = code.words()
    # pairwise intersecting triple with no coordinate common to all three
    trio = next(
        (0, a, b)
        for a in range(1, code.size)
        for b in range(a + 1, code.size)
        if (W[0] == W[a]).any() and (W[0] == W[b]).any() and (W[a] == W[b]).any()
        and not ((W[0] == W[a]) & (W[0] == W[b])).any()
    )
    assert classify_family(code, Family(code, trio)) == "other"


def test_absorption_examples():
    code = ers_create(5, 2)
    M = incidence_profile(code, {0}).size_M
    threshold = 25 - M
    prof = verify_star_absorption(code, star(code, 0, 0))
    assert prof[(0, 0)] == 25
    hm = hm_family(code, 0, 0, code.codeword([1, 0, 0]))
    prof = verify_star_absorption(code, hm)
    assert max(prof.values()) == threshold
    assert list(prof.values()).count(threshold) == 1 and prof[(0, 0)] == threshold
    sub = Family(code, star(code, 2, 1).indices[: threshold + 1])
    verify_star_absorption(code, sub)


def test_absorption_rejects_non_intersecting_overflow():
    code = ers_create(5, 2)
    M = incidence_profile(code, {0}).size_M
    members = star(code, 0, 0).indices[: 25 - M + 1].tolist()
    outside = next(i for i in range(code.size) if i not in set(star(code, 0, 0).indices.tolist()))
    with pytest.raises(VerificationFailed):
        verify_star_absorption(code, Family(code, members + [outside]))


@pytest.mark.parametrize("q", [3, 4, 5])
def test_every_maximum_family_passes_checks(q):
    code = ers_create(q, 2)
    res = classify_maximum_families(code)
    for fam, _ in res.census:
        chk = family_checks(code, fam)
        assert chk.few_or_many and chk.expander_mixing and chk.absorption
        if q == 4:
            assert chk.more_than_few is None
        else:
            assert chk.more_than_few is True
        assert chk


def test_hom3_q4_family_checks():
    code = ers_create(4, 3)
    res = max_intersecting_family(code)
    assert family_checks(code, res.witness)


def test_certificate_round_trip(tmp_path):
    code = ers_create(4, 2)
    res = max_intersecting_family(code)
    cert = res.certificate()
    assert cert["k"] == 2 and cert["dim"] == 3 and cert["size"] == 16
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(cert))
    fam = verify_certificate(json.loads(path.read_text()), code)
    assert fam == res.witness


def test_tampered_certificates_fail():
    code = ers_create(4, 2)
    cert = max_intersecting_family(code).certificate()
    bigger = dict(cert, size=17)
    with pytest.raises(VerificationFailed):
        verify_certificate(bigger, code)
    dup = dict(cert, family=cert["family"] + [cert["family"][0]], size=17)
    with pytest.raises(VerificationFailed):
        verify_certificate(dup, code)
    bad_entry = dict(cert, family=[[9, 0, 0]] + cert["family"][1:])
    with pytest.raises(VerificationFailed):
        verify_certificate(bad_entry, code)
    fam = list(cert["family"])
    swapped = next(c for c in ([a, b, d] for a in range(4) for b in range(4) for d in range(4)) if c not in fam)
    mixed = dict(cert, family=fam[:-1] + [swapped])
    with pytest.raises(VerificationFailed):
        verify_certificate(mixed, code)
    with pytest.raises(VerificationFailed):
        load_certificate(dict(cert, dim=4), code)


def test_search_cap():
    with pytest.raises(TooLarge):
        max_intersecting_family(ers_create(5, 3), cap=100)
    with pytest.raises(TooLarge):
        classify_maximum_families(ers_create(4, 2), cap=10)


def test_general_code_search():
    # a [4,2] code over F_3 whose system misses a line: stars stay maximum
    F = field_of_order(3)
    code = LinearCode(F, [[1, 0, 1, 1], [0, 1, 1, 2]])
    res = max_intersecting_family(code)
    best, _ = _maximum_cliques(code, 1)
    assert res.max_size == best
