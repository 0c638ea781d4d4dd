"""Algebra fixtures shared by the test modules."""

import itertools
import random

from glacalc.coeffring import RatFunc
from glacalc.gla import (
    abelian,
    bracket,
    build_algebra,
    ctor_bullet,
    ctor_deform_diffeo,
    ctor_der_plus_f,
    ctor_pullback_chart,
    diffeo_pair,
    heisenberg,
    sl2,
    tangent_line,
)


def identity_matrix(m):
    return [[1 if i == j else 0 for j in range(m)] for i in range(m)]


def builtin_algebras():
    return {
        "heisenberg": heisenberg(),
        "sl2": sl2(),
        "der_plus_f(1)": ctor_der_plus_f(1),
        "der_plus_f(2)": ctor_der_plus_f(2),
        "der_plus_f(3)": ctor_der_plus_f(3),
        "bullet(I1)": ctor_bullet(identity_matrix(1)),
        "bullet(I2)": ctor_bullet(identity_matrix(2)),
        "tangent_line": tangent_line(),
    }


def shift(m):
    """``h(x) = x + 1`` componentwise."""
    xs = [RatFunc.var(m, i) for i in range(m)]
    return diffeo_pair([x + 1 for x in xs], [x - 1 for x in xs])


def dilate(m):
    """``h(x) = 2x`` componentwise."""
    xs = [RatFunc.var(m, i) for i in range(m)]
    return diffeo_pair([x * 2 for x in xs], [x / RatFunc.const(m, 2) for x in xs])


def transformed_algebras():
    out = {}
    for name, A in builtin_algebras().items():
        for hname, h in (("x+1", shift(A.m)), ("2x", dilate(A.m))):
            out[f"deform({name}, {hname})"] = ctor_deform_diffeo(A, h)
            out[f"pullback({name}, {hname})"] = ctor_pullback_chart(A, h)
    return out


def table(p, entries, m=0, anchor=None):
    """Algebra from ``{(a, b, c): L^c_ab}`` (1-based, antisymmetrised)."""
    L = [[[RatFunc.zero(m)] * p for _ in range(p)] for _ in range(p)]
    for (a, b, c), v in entries.items():
        v = v if isinstance(v, RatFunc) else RatFunc.const(m, v)
        L[a - 1][b - 1][c - 1] = v
        L[b - 1][a - 1][c - 1] = -v
    if anchor is None:
        anchor = [[RatFunc.zero(m)] * m for _ in range(p)]
    return build_algebra(m, p, anchor, L)


def perturbed_tables():
    """Five antisymmetric tables that break one of the axioms."""
    x = RatFunc.var(1, 0)
    der = ctor_der_plus_f(1)
    bul = ctor_bullet(identity_matrix(2))
    return {
        "heisenberg + [t1,t3]=t1": table(3, {(1, 2, 3): 1, (1, 3, 1): 1}),
        "sl2 with [t2,t3]=t2": table(3, {(1, 2, 2): 2, (1, 3, 3): -2, (2, 3, 2): 1}),
        "p=4 [t1,t2]=t3, [t3,t4]=t1": table(4, {(1, 2, 3): 1, (3, 4, 1): 1}),
        "der_plus_f(1) + [d1,e]=x*d1": table(2, {(1, 2, 1): x}, m=1, anchor=der.anchor),
        "bullet(I2) + [d1,d2]=d1": table(2, {(1, 2, 1): 1}, m=2, anchor=bul.anchor),
    }


def jacobi_oracle(A):
    """First basis triple whose element-level Jacobi sum is nonzero, else ``None``."""
    for a, b, c in itertools.product(range(A.p), repeat=3):
        x, y, z = A.basis(a), A.basis(b), A.basis(c)
        j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
        if not j.is_zero():
            return a + 1, b + 1, c + 1
    return None


def _jacobi_holds(L, p):
    for a, b, c in itertools.combinations(range(p), 3):
        for mu in range(p):
            s = 0
            for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                s += sum(L[y][z][t] * L[x][t][mu] for t in range(p))
            if s:
                return False
    return True


def random_constant_algebra(p, rng, density=0.35):
    """Rejection-sample a nonabelian Lie algebra with small integer structure constants."""
    while True:
        L = [[[0] * p for _ in range(p)] for _ in range(p)]
        for a, b in itertools.combinations(range(p), 2):
            for c in range(p):
                if rng.random() < density / p:
                    v = rng.choice((-2, -1, 1, 2))
                    L[a][b][c] = v
                    L[b][a][c] = -v
        if _jacobi_holds(L, p) and any(any(any(r) for r in pl) for pl in L):
            entries = {
                (a + 1, b + 1, c + 1): L[a][b][c]
                for a, b in itertools.combinations(range(p), 2)
                for c in range(p)
                if L[a][b][c]
            }
            return table(p, entries)


def random_subspace_generators(A, r, rng):
    """``r`` random integer vectors; dependent draws are retried by the caller."""
    return [[rng.randint(-2, 2) for _ in range(A.p)] for _ in range(r)]


def morphism_fixtures():
    """Morphisms that pass ``validate_morphism``, keyed by a short description."""
    from glacalc.extcalc import Morphism

    H, S = heisenberg(), sl2()
    D1, D2 = ctor_der_plus_f(1), ctor_der_plus_f(2)
    T = tangent_line(("x1",))
    x = RatFunc.var(1, 0)
    return {
        "identity on der_plus_f(2)": Morphism.identity(D2),
        "heisenberg shear": Morphism(H, H, [[1, 0, 0], [1, 1, 0], [0, 0, 1]]),
        "sl2 flip": Morphism(S, S, [[-1, 0, 0], [0, 0, 1], [0, 1, 0]]),
        "heisenberg onto abelian(2)": Morphism(H, abelian(2), [[1, 0, 0], [0, 1, 0]]),
        "tangent line into der_plus_f(1)": Morphism(T, D1, [[1], [x]]),
    }
