"""Exterior calculus on ``Lambda(A)`` for a generalized Lie algebra ``A``.

Forms are stored on strictly increasing multi-indices (0-based) and evaluate
on arbitrary argument tuples with the permutation sign.  ``wedge`` and
``ext_diff`` have a coefficient-level implementation used everywhere and a
literal evaluation of their defining sums (``wedge_by_definition``,
``ext_diff_by_definition``) kept only as independent test oracles.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb

from . import linalg
from .coeffring import RatFunc
from .errors import AlgebraError, FormError
from .gla import (
    CheckResult,
    Element,
    ValidationReport,
    anchor_apply,
    bracket,
    random_element,
    random_ratfunc,
    scaled,
)

__all__ = [
    "Form",
    "Morphism",
    "MCEquation",
    "coframe",
    "function_form",
    "form_eval",
    "wedge",
    "interior",
    "lie_derivative",
    "ext_diff",
    "maurer_cartan",
    "validate_morphism",
    "pullback",
    "is_closed",
    "ce_exactness",
    "cohomology_dims",
    "wedge_by_definition",
    "ext_diff_by_definition",
    "random_form",
]


def sort_sign(idx):
    """``(sign, sorted_idx)`` of an index tuple; sign 0 on repeated indices."""
    idx = list(idx)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and idx[j - 1] == idx[j]:
            return 0, None
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return 0, None
    return sign, tuple(idx)


class Form:
    """A ``degree``-form: ``sum_I coeffs[I] t^I`` over increasing ``I``."""

    __slots__ = ("algebra", "degree", "coeffs")

    def __init__(self, algebra, degree, coeffs=None):
        if degree < 0:
            raise FormError("negative degree")
        self.algebra = algebra
        self.degree = degree
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 0 <= a < algebra.p for a in idx):
                raise FormError(f"bad multi-index {idx}")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise FormError(f"multi-index {idx} not strictly increasing")
            if c.nvars != algebra.m:
                raise FormError("ring mismatch")
            if c:
                clean[idx] = c
        self.coeffs = clean

    @classmethod
    def _raw(cls, algebra, degree, coeffs):
        f = cls.__new__(cls)
        f.algebra, f.degree, f.coeffs = algebra, degree, coeffs
        return f

    @classmethod
    def from_terms(cls, algebra, degree, terms):
        """Sum of ``coeff * t^{i_1} ^ ... ^ t^{i_q}`` for arbitrary index orders."""
        acc = {}
        for idx, c in terms:
            s, key = sort_sign(idx)
            if s:
                acc[key] = acc.get(key, RatFunc.zero(algebra.m)) + (c if s > 0 else -c)
        return cls(algebra, degree, acc)

    def component(self, idx):
        """Value on the basis tuple ``(t_{idx[0]}, ...)`` (any order)."""
        s, key = sort_sign(idx)
        if not s:
            return self.algebra.zero()
        c = self.coeffs.get(key)
        if c is None:
            return self.algebra.zero()
        return c if s > 0 else -c

    def is_zero(self):
        return not self.coeffs

    def _same(self, other):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise FormError("algebra mismatch")
        if other.degree != self.degree:
            raise FormError("degree mismatch")

    def __add__(self, other):
        self._same(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            w = out[k] + v if k in out else v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return Form._raw(self.algebra, self.degree, out)

    def __neg__(self):
        return Form._raw(self.algebra, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        if not isinstance(f, RatFunc):
            f = RatFunc.const(self.algebra.m, f)
        if not f:
            return Form._raw(self.algebra, self.degree, {})
        return Form._raw(self.algebra, self.degree, {k: f * v for k, v in self.coeffs.items()})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.algebra == other.algebra
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.degree, frozenset(self.coeffs.items())))

    def format(self, names=None):
        names = names or self.algebra.names
        if not self.coeffs:
            return "0"
        if self.degree == 0:
            return self.coeffs[()].format(names)
        parts = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            basis = "∧".join(f"t^{a + 1}" for a in idx)
            if c == 1:
                parts.append(basis)
            elif c == -1:
                parts.append(f"-{basis}")
            else:
                parts.append(scaled(c, basis, names))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"Form[{self.degree}]({self.format()})"


def zero_form(A, degree):
    return Form._raw(A, degree, {})


def function_form(A, f):
    return Form(A, 0, {(): f})


def coframe(A):
    """The dual 1-forms ``t^1..t^p``."""
    return [Form._raw(A, 1, {(a,): A.one()}) for a in range(A.p)]


def _check_alg(A, B):
    if A is not B and A != B:
        raise FormError("algebra mismatch")


def _eval_vectors(omega, vecs):
    A = omega.algebra
    q = omega.degree
    if q == 0:
        return omega.coeffs.get((), A.zero())
    # minors[S]: determinant of the first len(S) vectors on the columns S,
    # built row by row by cofactor expansion along the last row
    minors = {(): A.one()}
    for k in range(q):
        row = vecs[k]
        nxt = {}
        for S in itertools.combinations(range(A.p), k + 1):
            det = A.zero()
            for i, j in enumerate(S):
                if not row[j]:
                    continue
                sub = minors.get(S[:i] + S[i + 1:])
                if not sub:
                    continue
                term = sub * row[j]
                det = det - term if (k + i) % 2 else det + term
            if det:
                nxt[S] = det
        minors = nxt
    total = A.zero()
    for idx, c in omega.coeffs.items():
        det = minors.get(idx)
        if det:
            total = total + c * det
    return total


def form_eval(omega, *args):
    """``omega(z_1, ..., z_q)`` for elements ``z_j``."""
    if len(args) != omega.degree:
        raise FormError(f"arity mismatch: form of degree {omega.degree} given {len(args)} arguments")
    for z in args:
        _check_alg(omega.algebra, z.algebra)
    return _eval_vectors(omega, [z.coeffs for z in args])


def wedge(omega, theta):
    """Exterior product via index-set splittings."""
    _check_alg(omega.algebra, theta.algebra)
    A = omega.algebra
    q = omega.degree + theta.degree
    if q > A.p:
        return zero_form(A, q)
    out = {}
    for I, a in omega.coeffs.items():
        for J, b in theta.coeffs.items():
            if set(I) & set(J):
                continue
            s, key = sort_sign(I + J)
            v = a * b
            if s < 0:
                v = -v
            out[key] = out[key] + v if key in out else v
    return Form._raw(A, q, {k: v for k, v in out.items() if v})


def interior(z, omega):
    """``i_z omega``: contraction of the first slot; zero on functions."""
    _check_alg(omega.algebra, z.algebra)
    A = omega.algebra
    if omega.degree == 0:
        return zero_form(A, 0)
    out = {}
    for I, c in omega.coeffs.items():
        for pos, a in enumerate(I):
            za = z.coeffs[a]
            if not za:
                continue
            J = I[:pos] + I[pos + 1:]
            v = za * c
            if pos % 2:
                v = -v
            out[J] = out[J] + v if J in out else v
    return Form._raw(A, omega.degree - 1, {k: v for k, v in out.items() if v})


def lie_derivative(z, omega):
    """``(L_z omega)(z_1..z_q) = rho(z)(omega(..)) - sum_i omega(.., [z, z_i], ..)``."""
    _check_alg(omega.algebra, z.algebra)
    A = omega.algebra
    q = omega.degree
    if q == 0:
        return function_form(A, anchor_apply(z, omega.coeffs.get((), A.zero())))
    if q > A.p:
        return zero_form(A, q)
    brk = [bracket(z, A.basis(b)).coeffs for b in range(A.p)]
    out = {}
    for I in itertools.combinations(range(A.p), q):
        val = anchor_apply(z, omega.coeffs[I]) if I in omega.coeffs else A.zero()
        for pos, b in enumerate(I):
            for g, cg in enumerate(brk[b]):
                if cg:
                    comp = omega.component(I[:pos] + (g,) + I[pos + 1:])
                    if comp:
                        val = val - cg * comp
        if val:
            out[I] = val
    return Form._raw(A, q, out)


def ext_diff(omega):
    """Exterior differential by the coordinate formula with anchor and structure terms."""
    A = omega.algebra
    q = omega.degree
    if q + 1 > A.p:
        return zero_form(A, q + 1)
    out = {}
    for I in itertools.combinations(range(A.p), q + 1):
        val = A.zero()
        if A.m:
            for i, a in enumerate(I):
                c = omega.coeffs.get(I[:i] + I[i + 1:])
                if c is not None:
                    d = A.derive(a, c)
                    if d:
                        val = val + d if i % 2 == 0 else val - d
        for i, j in itertools.combinations(range(q + 1), 2):
            terms = A._brackets[I[i]][I[j]]
            if not terms:
                continue
            rest = I[:i] + I[i + 1:j] + I[j + 1:]
            for g, lg in terms:
                comp = omega.component((g,) + rest)
                if comp:
                    v = lg * comp
                    val = val + v if (i + j) % 2 == 0 else val - v
        if val:
            out[I] = val
    return Form._raw(A, q + 1, out)


# ---------------------------------------------------------------------------
# literal definitions (test oracles)


def wedge_by_definition(omega, theta, args):
    """Shuffle sum over permutations increasing on the first ``q`` and last ``r`` slots."""
    q, r = omega.degree, theta.degree
    total = omega.algebra.zero()
    for perm in itertools.permutations(range(q + r)):
        if any(perm[k] > perm[k + 1] for k in range(q - 1)):
            continue
        if any(perm[k] > perm[k + 1] for k in range(q, q + r - 1)):
            continue
        s, _ = sort_sign(perm)
        a = form_eval(omega, *(args[perm[k]] for k in range(q)))
        b = form_eval(theta, *(args[perm[k]] for k in range(q, q + r)))
        total = total + (a * b if s > 0 else -(a * b))
    return total


def ext_diff_by_definition(omega, args):
    """``d omega(z_0..z_q)`` evaluated term by term from its defining sum."""
    q = omega.degree
    total = omega.algebra.zero()
    for i in range(q + 1):
        rest = args[:i] + args[i + 1:]
        v = anchor_apply(args[i], form_eval(omega, *rest))
        total = total + v if i % 2 == 0 else total - v
    for i, j in itertools.combinations(range(q + 1), 2):
        rest = args[:i] + args[i + 1:j] + args[j + 1:]
        v = form_eval(omega, bracket(args[i], args[j]), *rest)
        total = total + v if (i + j) % 2 == 0 else total - v
    return total


def random_form(A, degree, rng):
    coeffs = {I: random_ratfunc(A.m, rng) for I in itertools.combinations(range(A.p), degree)}
    return Form(A, degree, coeffs)


# ---------------------------------------------------------------------------
# Maurer-Cartan


@dataclass
class MCEquation:
    label: str
    lhs: Form
    rhs: Form

    @property
    def equal(self):
        return self.lhs == self.rhs

    def format(self):
        return f"{self.label} = {self.lhs.format()}"


def maurer_cartan(A):
    """Structure equations ``d t^a = -sum_{b<c} L^a_bc t^b ^ t^c`` and ``d x^i = rho^i_a t^a``."""
    frame = coframe(A)
    eqs = []
    for a in range(A.p):
        lhs = ext_diff(frame[a])
        rhs = zero_form(A, 2)
        for b, c in itertools.combinations(range(A.p), 2):
            L = A.structure[b][c][a]
            if L:
                rhs = rhs + wedge(frame[b], frame[c]).scale(-L)
        eqs.append(MCEquation(f"d t^{a + 1}", lhs, rhs))
    for i in range(A.m):
        lhs = ext_diff(function_form(A, RatFunc.var(A.m, i)))
        rhs = zero_form(A, 1)
        for a in range(A.p):
            if A.anchor[a][i]:
                rhs = rhs + frame[a].scale(A.anchor[a][i])
        eqs.append(MCEquation(f"d {A.names[i]}", lhs, rhs))
    return eqs


# ---------------------------------------------------------------------------
# morphisms


class Morphism:
    """``phi(t_a) = sum_b matrix[b][a] t'_b``; ``matrix`` is ``p' x p``."""

    def __init__(self, source, target, matrix):
        if source.m != target.m:
            raise AlgebraError("ring mismatch")
        if len(matrix) != target.p or any(len(row) != source.p for row in matrix):
            raise AlgebraError("malformed morphism")
        self.source = source
        self.target = target
        self.matrix = tuple(
            tuple(v if isinstance(v, RatFunc) else RatFunc.const(source.m, v) for v in row)
            for row in matrix
        )

    @classmethod
    def identity(cls, A):
        return cls(A, A, [[A.one() if i == j else A.zero() for j in range(A.p)] for i in range(A.p)])

    def column(self, a):
        return tuple(row[a] for row in self.matrix)

    def apply(self, u):
        _check_alg(self.source, u.algebra)
        T = self.target
        out = []
        for row in self.matrix:
            s = T.zero()
            for c, ua in zip(row, u.coeffs):
                if c and ua:
                    s = s + c * ua
            out.append(s)
        return Element(T, tuple(out))


def validate_morphism(phi, samples=16, seed=0):
    S, T = phi.source, phi.target
    checks = []
    witness = None
    for a, b in itertools.combinations(range(S.p), 2):
        lhs = phi.apply(bracket(S.basis(a), S.basis(b)))
        rhs = bracket(phi.apply(S.basis(a)), phi.apply(S.basis(b)))
        if lhs != rhs:
            witness = f"(t{a + 1},t{b + 1}): {lhs.format()} != {rhs.format()}"
            break
    checks.append(CheckResult("bracket_basis", witness is None, witness))
    witness = None
    for a in range(S.p):
        img = phi.column(a)
        for k in range(S.m):
            val = T.zero()
            for b in range(T.p):
                if img[b] and T.anchor[b][k]:
                    val = val + img[b] * T.anchor[b][k]
            if val != S.anchor[a][k]:
                witness = f"t{a + 1} variable {S.names[k]}"
                break
        if witness:
            break
    checks.append(CheckResult("anchor_basis", witness is None, witness))
    rng = random.Random(seed)
    witness = None
    for s in range(samples):
        u, v = random_element(S, rng), random_element(S, rng)
        if phi.apply(bracket(u, v)) != bracket(phi.apply(u), phi.apply(v)):
            witness = f"sample {s}: u={u.format()}, v={v.format()}"
            break
    checks.append(CheckResult("bracket_random", witness is None, witness))
    witness = None
    for s in range(samples):
        u = random_element(S, rng)
        f = random_ratfunc(S.m, rng)
        if anchor_apply(phi.apply(u), f) != anchor_apply(u, f):
            witness = f"sample {s}: u={u.format()}, f={f.format(S.names)}"
            break
    checks.append(CheckResult("anchor_random", witness is None, witness))
    return ValidationReport(checks, seed=seed, samples=samples)


def pullback(phi, omega):
    """``(phi* omega)(z_1..z_q) = omega(phi z_1, .., phi z_q)``."""
    _check_alg(phi.target, omega.algebra)
    S = phi.source
    q = omega.degree
    if q == 0:
        return Form(S, 0, dict(omega.coeffs))
    if q > S.p:
        return zero_form(S, q)
    cols = [phi.column(a) for a in range(S.p)]
    out = {}
    for I in itertools.combinations(range(S.p), q):
        v = _eval_vectors(omega, [cols[a] for a in I])
        if v:
            out[I] = v
    return Form._raw(S, q, out)


# ---------------------------------------------------------------------------
# closed and exact forms


def is_closed(omega):
    return ext_diff(omega).is_zero()


def _require_constant(A):
    if A.m != 0:
        raise FormError("exactness solver restricted to constant-coefficient algebras")


def _d_matrix(A, q):
    """Matrix of ``d: Lambda^q -> Lambda^{q+1}`` in the increasing-index bases."""
    src = list(itertools.combinations(range(A.p), q))
    dst = list(itertools.combinations(range(A.p), q + 1))
    rows = [[A.zero()] * len(src) for _ in dst]
    pos = {I: k for k, I in enumerate(dst)}
    for j, I in enumerate(src):
        img = ext_diff(Form._raw(A, q, {I: A.one()}))
        for K, v in img.coeffs.items():
            rows[pos[K]][j] = v
    return rows, src, dst


def ce_exactness(omega):
    """An ``eta`` with ``d eta = omega``, or ``None`` if ``omega`` is not exact.

    Restricted to ``m = 0`` where ``d`` is linear over the rationals.
    """
    A = omega.algebra
    _require_constant(A)
    q = omega.degree
    if omega.is_zero():
        return zero_form(A, max(q - 1, 0))
    if q == 0 or q > A.p:
        return None
    rows, src, dst = _d_matrix(A, q - 1)
    rhs = [omega.coeffs.get(K, A.zero()) for K in dst]
    x = linalg.solve(rows, rhs, len(src), 0)
    if x is None:
        return None
    return Form(A, q - 1, {I: v for I, v in zip(src, x)})


def cohomology_dims(A):
    """``[(dim Z^q, dim B^q, dim Z^q - dim B^q) for q = 0..p]`` over the rationals."""
    _require_constant(A)
    ranks = []
    for q in range(A.p + 1):
        if q == A.p:
            ranks.append(0)
            continue
        rows, src, _ = _d_matrix(A, q)
        ranks.append(linalg.rank(rows, len(src)))
    out = []
    for q in range(A.p + 1):
        z = comb(A.p, q) - ranks[q]
        b = ranks[q - 1] if q else 0
        out.append((z, b, z - b))
    return out
