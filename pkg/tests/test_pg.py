import itertools

import pytest

from ekrcodes.errors import DimensionMismatch, DuplicatePoints, ProjectCenterItself, TooLarge
from ekrcodes.gf import field_of_order
from ekrcodes.pg import (
    Hyperplane,
    ProjPoint,
    collinear,
    enumerate_hyperplanes,
    enumerate_points,
    hyperplanes_through,
    incident,
    line_through,
    lines_through,
    point_array,
    points_on,
    project_from,
)


@pytest.mark.parametrize("k,q,n", [(3, 5, 31), (2, 4, 5), (4, 3, 40), (3, 2, 7), (4, 4, 85)])
def test_point_counts(k, q, n):
    F = field_of_order(q)
    pts = enumerate_points(k, F)
    assert len(pts) == n == len(enumerate_hyperplanes(k, F))
    assert len(set(pts)) == n
    assert [p.coords for p in pts] == sorted(p.coords for p in pts)
    assert pts[0].coords == (0,) * (k - 1) + (1,)


def test_canonical_form():
    F = field_of_order(5)
    P = ProjPoint(F, (0, 3, 2))
    assert P.coords == (0, 1, 4)
    assert ProjPoint(F, P.coords) == P
    assert str(P) == "(0:1:4)"
    with pytest.raises(ValueError):
        ProjPoint(F, (0, 0, 0))


def test_incidence_examples():
    F3, F2, F5 = field_of_order(3), field_of_order(2), field_of_order(5)
    assert incident(ProjPoint(F3, (1, 0, 0)), Hyperplane(F3, (0, 0, 1)))
    assert incident(ProjPoint(F2, (1, 1, 1)), Hyperplane(F2, (1, 0, 1)))
    assert not incident(ProjPoint(F5, (1, 2)), Hyperplane(F5, (1, 1)))
    with pytest.raises(DimensionMismatch):
        incident(ProjPoint(F5, (1, 2)), Hyperplane(F5, (1, 1, 1)))


def test_hyperplanes_through_examples():
    F5, F4, F2 = field_of_order(5), field_of_order(4), field_of_order(2)
    assert len(hyperplanes_through(ProjPoint(F5, (1, 2, 3)))) == 6
    assert len(hyperplanes_through(ProjPoint(F4, (0, 1, 2, 3)))) == 21
    duals = {H.dual for H in hyperplanes_through(ProjPoint(F2, (1, 0, 0)))}
    assert duals == {(0, 0, 1), (0, 1, 0), (0, 1, 1)}


@pytest.mark.parametrize("k,q", [(3, 3), (3, 4), (4, 2), (4, 3)])
def test_regular_incidence(k, q):
    F = field_of_order(q)
    per = (q ** (k - 1) - 1) // (q - 1)
    for P in enumerate_points(k, F):
        assert len(hyperplanes_through(P)) == per
    for H in enumerate_hyperplanes(k, F):
        assert len(points_on(H)) == per


def test_projection_examples():
    F = field_of_order(5)
    assert project_from(ProjPoint(F, (1, 0, 0)), ProjPoint(F, (1, 1, 1))).coords == (1, 1)
    assert project_from(ProjPoint(F, (1, 0, 0)), ProjPoint(F, (0, 1, 0))).coords == (1, 0)
    assert project_from(ProjPoint(F, (0, 0, 1)), ProjPoint(F, (1, 2, 3))).coords == (1, 2)
    with pytest.raises(ProjectCenterItself):
        project_from(ProjPoint(F, (1, 2, 3)), ProjPoint(F, (2, 4, 1)))


@pytest.mark.parametrize("k,q", [(3, 3), (3, 4), (4, 3)])
def test_projection_maps_lines_to_quotient_points(k, q):
    F = field_of_order(q)
    quotient = {p.coords for p in enumerate_points(k - 1, F)}
    for Q in enumerate_points(k, F)[::5]:
        lines = lines_through(Q)
        images = set()
        for L in lines:
            assert len(L.points) == q + 1 and Q in L
            imgs = {project_from(Q, P).coords for P in L.points if P != Q}
            assert len(imgs) == 1
            images |= imgs
        assert images == quotient and len(lines) == len(quotient)


def test_collinear_examples():
    F = field_of_order(5)
    P = lambda *c: ProjPoint(F, c)
    assert collinear(P(1, 0, 0), P(0, 1, 0), P(1, 1, 0))
    assert not collinear(P(1, 0, 0), P(0, 1, 0), P(0, 0, 1))
    # conic points nu(x:y) = (y^2 : xy : x^2) for (0:1), (1:1), (1:0)
    assert not collinear(P(1, 0, 0), P(1, 1, 1), P(0, 0, 1))
    with pytest.raises(DuplicatePoints):
        collinear(P(1, 0, 0), P(2, 0, 0), P(0, 1, 0))


def test_line_through_has_q_plus_one_points():
    F = field_of_order(7)
    pts = enumerate_points(3, F)
    for A, B in itertools.islice(itertools.combinations(pts, 2), 0, 400, 17):
        L = line_through(A, B)
        assert len(L.points) == 8 and A in L and B in L
        for C in L.points:
            if C not in (A, B):
                assert collinear(A, B, C)


def test_enumeration_cap():
    with pytest.raises(TooLarge):
        point_array(5, field_of_order(32), cap=1000)
