"""Generalized Lie algebras over the rational-function ring, one chart at a time.

An :class:`Algebra` is a free ``F``-module with basis ``t_1..t_p``, an anchor
matrix ``rho[a][i]`` (the derivation ``rho(t_a) = sum_i rho[a][i] d/dx_i``) and
structure functions ``L[a][b][c]`` with ``[t_a, t_b] = sum_c L[a][b][c] t_c``.

Indices are 0-based in the Python API and 1-based in every printed witness.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import linalg
from .coeffring import RatFunc, default_names
from .errors import AlgebraError, RingError

__all__ = [
    "Algebra",
    "Element",
    "DiffeoPair",
    "CheckResult",
    "ValidationReport",
    "build_algebra",
    "bracket",
    "anchor_apply",
    "validate_axioms",
    "heisenberg",
    "sl2",
    "tangent_line",
    "abelian",
    "ctor_der_plus_f",
    "ctor_bullet",
    "ctor_deform_diffeo",
    "ctor_pullback_chart",
    "diffeo_pair",
    "random_ratfunc",
    "random_element",
]


def scaled(c, label, names):
    """``c*label`` with ``c`` parenthesised unless it prints as a single factor."""
    text = c.format(names)
    if " " in text or "/" in text or "-" in text[1:]:
        return f"({text})*{label}"
    return f"{text}*{label}"


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str | None = None


@dataclass
class ValidationReport:
    checks: list[CheckResult]
    seed: int | None = None
    samples: int | None = None

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _as_rf(value, m):
    if isinstance(value, RatFunc):
        if value.nvars != m:
            raise AlgebraError("malformed algebra")
        return value
    try:
        return RatFunc.const(m, value)
    except (TypeError, ValueError) as exc:
        raise AlgebraError("malformed algebra") from exc


@dataclass(frozen=True, eq=False)
class Algebra:
    """Structure data of a generalized Lie algebra on one chart.

    Build instances with :func:`build_algebra`, which validates shapes and
    antisymmetry.  Equality compares ``m``, ``p``, anchor and structure only.
    """

    m: int
    p: int
    anchor: tuple
    structure: tuple
    labels: tuple = field(default=())
    names: tuple = field(default=())

    def __post_init__(self):
        # sparse views used by the hot paths
        brackets = [[[] for _ in range(self.p)] for _ in range(self.p)]
        for a, b, c in itertools.product(range(self.p), repeat=3):
            v = self.structure[a][b][c]
            if v:
                brackets[a][b].append((c, v))
        object.__setattr__(self, "_brackets", brackets)
        object.__setattr__(
            self,
            "_anchor_nz",
            [[(i, v) for i, v in enumerate(row) if v] for row in self.anchor],
        )

    def __eq__(self, other):
        if not isinstance(other, Algebra):
            return NotImplemented
        return (self.m, self.p, self.anchor, self.structure) == (
            other.m,
            other.p,
            other.anchor,
            other.structure,
        )

    def __hash__(self):
        return hash((self.m, self.p, self.anchor, self.structure))

    def zero(self):
        return RatFunc.zero(self.m)

    def one(self):
        return RatFunc.one(self.m)

    def basis(self, a):
        """The basis element ``t_{a+1}``."""
        z, o = self.zero(), self.one()
        return Element(self, tuple(o if k == a else z for k in range(self.p)))

    def element(self, coeffs):
        coeffs = tuple(_as_rf(c, self.m) for c in coeffs)
        if len(coeffs) != self.p:
            raise AlgebraError("malformed element")
        return Element(self, coeffs)

    def zero_element(self):
        return Element(self, (self.zero(),) * self.p)

    def derive(self, a, f):
        """``rho(t_a)(f)``."""
        total = self.zero()
        for i, r in self._anchor_nz[a]:
            d = f.partial(i)
            if d:
                total = total + r * d
        return total

    def anchor_vector(self, u):
        """Components of the derivation ``rho(u)`` in the basis ``d/dx_i``."""
        vec = []
        for i in range(self.m):
            s = self.zero()
            for a in range(self.p):
                if u.coeffs[a] and self.anchor[a][i]:
                    s = s + u.coeffs[a] * self.anchor[a][i]
            vec.append(s)
        return vec


class Element:
    """``sum_a coeffs[a] t_a`` in a fixed algebra."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs):
        self.algebra = algebra
        self.coeffs = tuple(coeffs)

    def _same(self, other):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraError("mixed algebras")

    def __add__(self, other):
        self._same(other)
        return Element(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._same(other)
        return Element(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Element(self.algebra, tuple(-a for a in self.coeffs))

    def scale(self, f):
        f = _as_rf(f, self.algebra.m)
        return Element(self.algebra, tuple(f * a for a in self.coeffs))

    def __rmul__(self, f):
        return self.scale(f)

    def is_zero(self):
        return not any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra == other.algebra and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def format(self, names=None):
        alg = self.algebra
        names = names or alg.names
        labels = alg.labels or tuple(f"t{k + 1}" for k in range(alg.p))
        parts = []
        for c, lab in zip(self.coeffs, labels):
            if not c:
                continue
            if c == 1:
                parts.append(lab)
            elif c == -1:
                parts.append(f"-{lab}")
            else:
                parts.append(scaled(c, lab, names))
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"Element({self.format()})"


def build_algebra(m, p, anchor, structure, labels=None, names=None):
    """Validate shapes and antisymmetry and return an :class:`Algebra`.

    ``anchor[a][i]`` holds ``rho^i_a``; ``structure[a][b][c]`` holds ``L^c_{ab}``.
    Entries may be :class:`RatFunc` or rationals.
    """
    if m < 0 or p < 0:
        raise AlgebraError("malformed algebra")
    if len(anchor) != p or any(len(row) != m for row in anchor):
        raise AlgebraError("malformed algebra")
    if len(structure) != p or any(
        len(plane) != p or any(len(row) != p for row in plane) for plane in structure
    ):
        raise AlgebraError("malformed algebra")
    anchor_t = tuple(tuple(_as_rf(v, m) for v in row) for row in anchor)
    struct_t = tuple(
        tuple(tuple(_as_rf(v, m) for v in row) for row in plane) for plane in structure
    )
    for a, b, c in itertools.product(range(p), repeat=3):
        if b < a:
            continue
        if (struct_t[a][b][c] + struct_t[b][a][c]).is_zero():
            continue
        raise AlgebraError(f"antisymmetry violated at ({a + 1},{b + 1},{c + 1})")
    labels = tuple(labels) if labels else tuple(f"t{k + 1}" for k in range(p))
    names = tuple(names) if names else default_names(m)
    if len(labels) != p or len(names) != m:
        raise AlgebraError("malformed algebra")
    return Algebra(m, p, anchor_t, struct_t, labels, names)


def bracket(u, v):
    """Leibniz-extended bracket of two general elements.

    ``[u,v]^c = u^a v^b L^c_ab + rho(u)(v^c) - rho(v)(u^c)``.
    """
    if u.algebra is not v.algebra and u.algebra != v.algebra:
        raise AlgebraError("mixed algebras")
    A = u.algebra
    out = [A.zero()] * A.p
    for a, ua in enumerate(u.coeffs):
        if not ua:
            continue
        for b, vb in enumerate(v.coeffs):
            if not vb:
                continue
            terms = A._brackets[a][b]
            if terms:
                w = ua * vb
                for c, lc in terms:
                    out[c] = out[c] + w * lc
    if A.m:
        au, av = A.anchor_vector(u), A.anchor_vector(v)
        for c in range(A.p):
            s = out[c]
            for i in range(A.m):
                if au[i]:
                    d = v.coeffs[c].partial(i)
                    if d:
                        s = s + au[i] * d
                if av[i]:
                    d = u.coeffs[c].partial(i)
                    if d:
                        s = s - av[i] * d
            out[c] = s
    return Element(A, tuple(out))


def anchor_apply(u, f):
    """``rho(u)(f) = u^a rho^i_a d_i f``."""
    A = u.algebra
    if f.nvars != A.m:
        raise RingError("ring mismatch")
    total = A.zero()
    for i, ai in enumerate(A.anchor_vector(u)):
        if ai:
            d = f.partial(i)
            if d:
                total = total + ai * d
    return total


# ---------------------------------------------------------------------------
# random test data


def _monomials(m, degree):
    for exp in itertools.product(range(degree + 1), repeat=m):
        if sum(exp) <= degree:
            yield exp


def random_ratfunc(m, rng, degree=2, bound=3):
    """Polynomial of total degree <= ``degree`` with integer coefficients in [-bound, bound]."""
    total = RatFunc.zero(m)
    for exp in _monomials(m, degree):
        c = rng.randint(-bound, bound)
        if not c:
            continue
        term = RatFunc.const(m, c)
        for i, e in enumerate(exp):
            if e:
                term = term * RatFunc.var(m, i) ** e
        total = total + term
    return total


def random_element(A, rng):
    return Element(A, tuple(random_ratfunc(A.m, rng) for _ in range(A.p)))


# ---------------------------------------------------------------------------
# axioms


def _basis_jacobi(A):
    L, p = A.structure, A.p
    for a, b, c in itertools.product(range(p), repeat=3):
        for mu in range(p):
            total = A.zero()
            for x, y, z in ((a, b, c), (c, a, b), (b, c, a)):
                for th in range(p):
                    if L[y][z][th] and L[x][th][mu]:
                        total = total + L[y][z][th] * L[x][th][mu]
                total = total + A.derive(x, L[y][z][mu])
            if total:
                return CheckResult(
                    "basis_jacobi",
                    False,
                    f"({a + 1},{b + 1},{c + 1}) component {mu + 1}: {total.format(A.names)}",
                )
    return CheckResult("basis_jacobi", True)


def _anchor_compat(A):
    L, p = A.structure, A.p
    for a, b in itertools.product(range(p), repeat=2):
        for k in range(A.m):
            lhs = A.zero()
            for c in range(p):
                if L[a][b][c] and A.anchor[c][k]:
                    lhs = lhs + L[a][b][c] * A.anchor[c][k]
            rhs = A.derive(a, A.anchor[b][k]) - A.derive(b, A.anchor[a][k])
            if lhs != rhs:
                return CheckResult(
                    "anchor_compatibility",
                    False,
                    f"({a + 1},{b + 1}) variable {A.names[k]}: "
                    f"{lhs.format(A.names)} != {rhs.format(A.names)}",
                )
    return CheckResult("anchor_compatibility", True)


def _element_jacobi(A, samples, rng):
    for s in range(samples):
        u, v, z = (random_element(A, rng) for _ in range(3))
        jac = bracket(u, bracket(v, z)) + bracket(z, bracket(u, v)) + bracket(v, bracket(z, u))
        if not jac.is_zero():
            return CheckResult(
                "element_jacobi",
                False,
                f"sample {s}: u={u.format()}, v={v.format()}, z={z.format()}",
            )
    return CheckResult("element_jacobi", True)


def _anchor_morphism(A, samples, rng):
    for s in range(samples):
        u, v = random_element(A, rng), random_element(A, rng)
        f = random_ratfunc(A.m, rng)
        lhs = anchor_apply(bracket(u, v), f)
        rhs = anchor_apply(u, anchor_apply(v, f)) - anchor_apply(v, anchor_apply(u, f))
        if lhs != rhs:
            return CheckResult(
                "anchor_morphism",
                False,
                f"sample {s}: u={u.format()}, v={v.format()}, f={f.format(A.names)}",
            )
    return CheckResult("anchor_morphism", True)


def validate_axioms(A, samples=16, seed=0):
    """Exhaustive basis-level identities plus seeded element-level checks."""
    rng = random.Random(seed)
    checks = [
        _basis_jacobi(A),
        _anchor_compat(A),
        _element_jacobi(A, samples, rng),
        _anchor_morphism(A, samples, rng),
    ]
    return ValidationReport(checks, seed=seed, samples=samples)


# ---------------------------------------------------------------------------
# named constructors


def _zeros3(p, m):
    z = RatFunc.zero(m)
    return [[[z] * p for _ in range(p)] for _ in range(p)]


def _set_bracket(L, a, b, c, value):
    L[a][b][c] = value
    L[b][a][c] = -value


def heisenberg():
    """``[t1,t2] = t3`` over the rationals (m = 0)."""
    L = _zeros3(3, 0)
    _set_bracket(L, 0, 1, 2, RatFunc.one(0))
    return build_algebra(0, 3, [[]] * 3, L)


def sl2():
    """``[t1,t2] = 2 t2``, ``[t1,t3] = -2 t3``, ``[t2,t3] = t1`` (m = 0)."""
    L = _zeros3(3, 0)
    _set_bracket(L, 0, 1, 1, RatFunc.const(0, 2))
    _set_bracket(L, 0, 2, 2, RatFunc.const(0, -2))
    _set_bracket(L, 1, 2, 0, RatFunc.one(0))
    return build_algebra(0, 3, [[]] * 3, L)


def abelian(p, m=0, names=None):
    return build_algebra(m, p, [[RatFunc.zero(m)] * m for _ in range(p)], _zeros3(p, m), names=names)


def tangent_line(names=("x",)):
    """The standard chart ``m = p = 1``, ``rho = id``, ``L = 0``."""
    return build_algebra(1, 1, [[RatFunc.one(1)]], _zeros3(1, 1), names=names)


def ctor_der_plus_f(m, names=None):
    """``Der(F) (+) F``: basis ``d_1..d_m, e`` with zero structure constants."""
    if m < 1:
        raise AlgebraError("requires at least one variable")
    p = m + 1
    z, o = RatFunc.zero(m), RatFunc.one(m)
    anchor = [[o if i == a else z for i in range(m)] for a in range(p)]
    labels = [f"d{i + 1}" for i in range(m)] + ["e"]
    return build_algebra(m, p, anchor, _zeros3(p, m), labels=labels, names=names)


def ctor_bullet(rho_self, names=None):
    """``Der(F)`` with the bullet bracket ``X.Y - Y.X`` for the anchor ``rho_self``.

    On this ring the second-order parts cancel and the bracket reduces to
    ``(rho(X)(Y^k) - rho(Y)(X^k)) d_k``: zero structure constants, anchor
    ``rho_self``.
    """
    m = len(rho_self)
    if m < 1:
        raise AlgebraError("requires at least one variable")
    if any(len(row) != m for row in rho_self):
        raise AlgebraError("malformed algebra")
    labels = [f"d{i + 1}" for i in range(m)]
    return build_algebra(m, m, rho_self, _zeros3(m, m), labels=labels, names=names)


@dataclass(frozen=True)
class DiffeoPair:
    forward: tuple
    inverse: tuple

    @property
    def m(self):
        return len(self.forward)


def diffeo_pair(forward, inverse):
    """Check that ``inverse`` undoes ``forward`` on both sides."""
    forward, inverse = tuple(forward), tuple(inverse)
    m = len(forward)
    if len(inverse) != m or any(f.nvars != m for f in forward + inverse):
        raise AlgebraError("not a diffeomorphism pair")
    ident = [RatFunc.var(m, i) for i in range(m)]
    try:
        fi = [f.compose(inverse) for f in forward]
        if_ = [g.compose(forward) for g in inverse]
    except RingError as exc:
        raise AlgebraError("not a diffeomorphism pair") from exc
    if fi != ident or if_ != ident:
        raise AlgebraError("not a diffeomorphism pair")
    return DiffeoPair(forward, inverse)


def _check_pair(A, h):
    if h.m != A.m:
        raise AlgebraError("not a diffeomorphism pair")
    # re-run the inverse check for pairs built without diffeo_pair()
    diffeo_pair(h.forward, h.inverse)


def ctor_deform_diffeo(A, h):
    """Replace the anchor by ``rho~`` with ``rho~(t_a)(f) = rho^i_a (d_i(f o h)) o h^-1``.

    By the chain rule ``rho~^k_a = rho^i_a (d_i h^k o h^-1)``; the structure
    constants are kept.
    """
    _check_pair(A, h)
    m = A.m
    jac = [[h.forward[k].partial(i).compose(h.inverse) for k in range(m)] for i in range(m)]
    if m and not linalg.det(jac, m):
        raise AlgebraError("singular deformation")
    anchor = []
    for a in range(A.p):
        row = []
        for k in range(m):
            s = RatFunc.zero(m)
            for i in range(m):
                if A.anchor[a][i] and jac[i][k]:
                    s = s + A.anchor[a][i] * jac[i][k]
            row.append(s)
        anchor.append(row)
    return build_algebra(m, A.p, anchor, A.structure, labels=A.labels, names=A.names)


def ctor_pullback_chart(A, h):
    """Compose every structure function and anchor entry with ``h``."""
    _check_pair(A, h)
    m = A.m
    if m == 0:
        return A
    jac = [[h.forward[k].partial(i) for k in range(m)] for i in range(m)]
    if not linalg.det(jac, m):
        raise AlgebraError("singular deformation")
    anchor = [[v.compose(h.forward) for v in row] for row in A.anchor]
    structure = [[[v.compose(h.forward) for v in row] for row in plane] for plane in A.structure]
    return build_algebra(m, A.p, anchor, structure, labels=A.labels, names=A.names)
