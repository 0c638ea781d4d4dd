import itertools
import random

import pytest

from glacalc.coeffring import RatFunc, parse_ratfunc
from glacalc.errors import FormError, SubspaceError
from glacalc.extcalc import Form, coframe, ext_diff, form_eval, wedge, zero_form
from glacalc.gla import abelian, ctor_der_plus_f, heisenberg, random_ratfunc
from glacalc.idsys import (
    IdealSpec,
    Subspace,
    annihilator,
    cartan_equivalence,
    eas_check,
    frobenius_certificate,
    involutive_direct,
    symplectic_check,
)
from helpers import builtin_algebras, random_constant_algebra, random_subspace_generators


def coord(A, *idx):
    return Subspace(A, [A.basis(i - 1) for i in idx])


def test_annihilator_examples():
    H = heisenberg()
    assert annihilator(coord(H, 1, 3)) == [coframe(H)[1]]
    assert annihilator(coord(H, 1, 2, 3)) == []


def test_degenerate_generating_set():
    D = ctor_der_plus_f(1)
    x = parse_ratfunc("x1", ("x1",))
    E = Subspace(D, [D.basis(0), x * D.basis(0)])
    with pytest.raises(SubspaceError, match="degenerate generating set: rank 1 < 2"):
        annihilator(E)
    with pytest.raises(SubspaceError):
        cartan_equivalence(E)


def test_involutive_direct_examples():
    H = heisenberg()
    assert involutive_direct(coord(H, 1, 3)) == (True, [])
    ok, wits = involutive_direct(coord(H, 1, 2))
    assert not ok
    assert [(a, b) for a, b, _ in wits] == [(1, 2)]
    assert wits[0][2] == H.basis(2)


def test_rank_one_constant_subspaces_are_involutive():
    rng = random.Random(4)
    A = random_constant_algebra(4, rng)
    for _ in range(5):
        gen = random_subspace_generators(A, 1, rng)
        if any(gen[0]):
            assert cartan_equivalence(Subspace(A, gen)).involutive


def test_frobenius_examples():
    H = heisenberg()
    cert = frobenius_certificate(coord(H, 1, 2))
    assert not cert.involutive
    assert cert.format_obstruction() == ["A^3_12 = -1"]
    good = frobenius_certificate(coord(H, 1, 3))
    assert good.involutive and not good.obstruction
    full = frobenius_certificate(coord(H, 1, 2, 3))
    assert full.involutive and not full.omega


def check_certificate(cert):
    A = cert.coframe[0].algebra
    p = A.p
    for a in range(cert.r, p):
        recon = zero_form(A, 2)
        for g in range(cert.r, p):
            recon = recon + wedge(cert.omega[(a + 1, g + 1)], cert.coframe[g])
        assert recon == ext_diff(cert.coframe[a])


def test_eas_examples():
    H = heisenberg()
    t = coframe(H)
    assert eas_check(IdealSpec([t[1]]), coord(H, 1, 3)).passed
    res = eas_check(IdealSpec([t[2]]), coord(H, 1, 2))
    assert not res.passed
    assert res.vanishing.witness == "d g1(s1,s2) = -1"
    assert eas_check(IdealSpec([zero_form(H, 1)]), coord(H, 1, 2)).passed


def test_eas_degree_cap():
    H = heisenberg()
    t = coframe(H)
    with pytest.raises(SubspaceError, match="raise degree cap"):
        eas_check(IdealSpec([t[1]], degree_cap=1), coord(H, 1, 3))
    assert eas_check(IdealSpec([t[1]], degree_cap=3), coord(H, 1, 3)).passed


@pytest.mark.parametrize("name", sorted(builtin_algebras()))
def test_coordinate_subspaces_agree(name):
    A = builtin_algebras()[name]
    for r in range(1, A.p + 1):
        for idx in itertools.combinations(range(1, A.p + 1), r):
            rep = cartan_equivalence(coord(A, *idx))
            if rep.involutive:
                check_certificate(rep.certificate)


def test_random_constant_subspaces_agree():
    rng = random.Random(21)
    verdicts = set()
    for p in (3, 4):
        A = random_constant_algebra(p, rng)
        for _ in range(8):
            E = Subspace(A, random_subspace_generators(A, 2, rng))
            try:
                E.check()
            except SubspaceError:
                continue
            rep = cartan_equivalence(E)
            verdicts.add(rep.involutive)
            if rep.involutive:
                check_certificate(rep.certificate)
    assert verdicts == {True, False}


def test_nonconstant_subspaces_agree():
    A = ctor_der_plus_f(2)
    rng = random.Random(8)
    seen = set()
    for _ in range(6):
        gens = [[random_ratfunc(2, rng, degree=1) for _ in range(A.p)] for _ in range(2)]
        E = Subspace(A, gens)
        rep = cartan_equivalence(E)
        seen.add(rep.involutive)
        if rep.involutive:
            check_certificate(rep.certificate)
    assert False in seen


def test_verdict_invariant_under_recombination():
    rng = random.Random(13)
    A = random_constant_algebra(4, rng)
    checked = 0
    while checked < 6:
        gens = random_subspace_generators(A, 2, rng)
        E = Subspace(A, gens)
        try:
            E.check()
        except SubspaceError:
            continue
        a, b, c, d = (rng.randint(-2, 2) for _ in range(4))
        if a * d - b * c == 0:
            continue
        s1, s2 = E.generators
        F = Subspace(A, [a * s1 + b * s2, c * s1 + d * s2])
        assert frobenius_certificate(E).involutive == frobenius_certificate(F).involutive
        checked += 1


def test_annihilator_pairing_exact():
    A = ctor_der_plus_f(2)
    rng = random.Random(1)
    gens = [[random_ratfunc(2, rng) for _ in range(A.p)]]
    E = Subspace(A, gens)
    for theta in annihilator(E):
        for s in E.generators:
            assert form_eval(theta, s).is_zero()


def test_symplectic_examples():
    B = abelian(2)
    t = coframe(B)
    res = symplectic_check(wedge(t[0], t[1]))
    assert res.symplectic and res.determinant == 1
    H = heisenberg()
    h = coframe(H)
    res = symplectic_check(wedge(h[0], h[1]))
    assert res.closed and not res.nondegenerate and not res.even_dimension
    assert not symplectic_check(zero_form(B, 2)).nondegenerate
    with pytest.raises(FormError):
        symplectic_check(t[0])


def test_symplectic_non_closed_form():
    D = ctor_der_plus_f(3)
    x2 = RatFunc.var(3, 1)
    w = Form(D, 2, {(0, 1): D.one(), (2, 3): x2})
    res = symplectic_check(w)
    assert res.determinant == x2 * x2
    assert res.nondegenerate and not res.closed
