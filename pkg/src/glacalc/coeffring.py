"""Exact rational functions in ``m`` variables over the rationals.

This is the coefficient ring ``F`` of every algebra in the package, with the
partial derivatives ``d/dx_1 .. d/dx_m`` as its derivation basis.  Partial
derivatives commute here, so the bracket constants of ``Der(F)`` vanish.

Values are immutable.  A :class:`RatFunc` is always stored in canonical form:

* numerator and denominator are coprime polynomials,
* both carry integer coefficients whose overall gcd is 1,
* the denominator's leading coefficient (graded lex order) is positive.

Canonical form makes equality a plain structural comparison.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .errors import ParseError, RingError

__all__ = [
    "Poly",
    "RatFunc",
    "default_names",
    "parse_ratfunc",
    "rf_normalize",
    "rf_arith",
    "rf_partial",
    "rf_equal",
]


def default_names(m):
    """Default variable names ``x1..xm``."""
    return tuple(f"x{i + 1}" for i in range(m))


def _coef(c):
    """Exact coefficient, stored as ``int`` whenever it is integral."""
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def _grlex_key(exp):
    return (sum(exp), exp)


class Poly:
    """Sparse multivariate polynomial with rational coefficients.

    Integral coefficients are kept as ``int`` (the common case after
    normalisation), others as :class:`~fractions.Fraction`.

    ``terms`` maps exponent tuples of length ``nvars`` to nonzero coefficients.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != nvars:
                    raise RingError("ring mismatch")
                if c:
                    clean[tuple(exp)] = _coef(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # terms already clean: tuple keys, nonzero values
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, nvars, c):
        c = _coef(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars, i):
        """The coordinate polynomial ``x_{i+1}`` (``i`` is 0-based)."""
        if not 0 <= i < nvars:
            raise RingError("unknown variable")
        exp = tuple(1 if k == i else 0 for k in range(nvars))
        return cls._raw(nvars, {exp: 1})

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        if not self.terms:
            return True
        return len(self.terms) == 1 and not any(next(iter(self.terms)))

    def is_monomial(self):
        return len(self.terms) == 1

    def constant_value(self):
        return Fraction(self.terms.get((0,) * self.nvars, 0))

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def leading(self):
        """Leading ``(exponent, coefficient)`` under graded lex order."""
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def _check(self, other):
        if self.nvars != other.nvars:
            raise RingError("ring mismatch")

    def __add__(self, other):
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly._raw(self.nvars, out)

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        if not self.terms or not other.terms:
            return Poly._raw(self.nvars, {})
        n = self.nvars
        if n == 0:
            return Poly._raw(0, {(): self.terms[()] * other.terms[()]})
        # pack exponent vectors into one integer so that adding them is one addition
        base = self.total_degree() + other.total_degree() + 1
        weights = [base**i for i in range(n)]

        def pack(terms):
            return [(sum(w * a for w, a in zip(weights, e)), c) for e, c in terms.items()]

        right = pack(other.terms)
        out = {}
        get = out.get
        for k1, c1 in pack(self.terms):
            for k2, c2 in right:
                k = k1 + k2
                out[k] = get(k, 0) + c1 * c2
        terms = {}
        for k, c in out.items():
            if c:
                e = []
                for _ in range(n):
                    k, a = divmod(k, base)
                    e.append(a)
                terms[tuple(e)] = c
        return Poly._raw(n, terms)

    def scale(self, c):
        c = _coef(c)
        if not c:
            return Poly._raw(self.nvars, {})
        return Poly._raw(self.nvars, {e: _coef(v * c) for e, v in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            raise RingError("negative exponent on a polynomial")
        result = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def partial(self, i):
        if not 0 <= i < self.nvars:
            raise RingError("unknown variable")
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly._raw(self.nvars, out)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def format(self, names=None):
        names = names or default_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[exp]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(exp) if k
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)

    def __repr__(self):
        return f"Poly({self.format()!r})"


@lru_cache(maxsize=None)
def _zz_ring(m):
    from sympy.polys.domains import ZZ
    from sympy.polys.rings import ring

    return ring(",".join(f"_v{i}" for i in range(m)), ZZ)[0]


def _integer_scale(*polys):
    """Lcm of the coefficient denominators of ``polys``."""
    den = 1
    for p in polys:
        for c in p.terms.values():
            den = math.lcm(den, c.denominator)
    return den


def _exact_cancel(n, d):
    """Divide ``n`` and ``d`` by their polynomial gcd (up to constants)."""
    if n.is_constant() or d.is_constant():
        return n, d
    if n.is_monomial() or d.is_monomial():
        m = n.nvars
        low = [min(e[i] for e in n.terms) for i in range(m)]
        for i in range(m):
            low[i] = min(low[i], min(e[i] for e in d.terms))
        if not any(low):
            return n, d

        def shift(p):
            return Poly._raw(
                m, {tuple(a - b for a, b in zip(e, low)): c for e, c in p.terms.items()}
            )

        return shift(n), shift(d)
    R = _zz_ring(n.nvars)
    sn, sd = _integer_scale(n), _integer_scale(d)
    pn = R.from_dict({e: int(c * sn) for e, c in n.terms.items()})
    pd = R.from_dict({e: int(c * sd) for e, c in d.terms.items()})
    _, cn, cd = pn.cofactors(pd)
    nn = Poly._raw(n.nvars, {e: int(c) for e, c in cn.items()})
    dd = Poly._raw(d.nvars, {e: int(c) for e, c in cd.items()})
    return nn, dd


def _canonical(n, d):
    if d.is_zero():
        raise RingError("division by zero in F")
    m = n.nvars
    if n.is_zero():
        return Poly._raw(m, {}), Poly.const(m, 1)
    if d.terms.get((0,) * m) == 1 and len(d.terms) == 1:
        if all(type(c) is int for c in n.terms.values()):
            return n, d
    n, d = _exact_cancel(n, d)
    scale = _integer_scale(n, d)
    g = 0
    for p in (n, d):
        for c in p.terms.values():
            g = math.gcd(g, int(c * scale))
    factor = Fraction(scale, g)
    if d.leading()[1] < 0:
        factor = -factor
    if factor != 1:
        return n.scale(factor), d.scale(factor)
    return (
        Poly._raw(m, {e: _coef(c) for e, c in n.terms.items()}),
        Poly._raw(m, {e: _coef(c) for e, c in d.terms.items()}),
    )


class RatFunc:
    """Canonical quotient ``num/den`` of polynomials in ``nvars`` variables."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        if den is None:
            den = Poly.const(num.nvars, 1)
        if num.nvars != den.nvars:
            raise RingError("ring mismatch")
        self.num, self.den = _canonical(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num, den):
        r = cls.__new__(cls)
        r.num, r.den, r._hash = num, den, None
        return r

    @classmethod
    def const(cls, nvars, c):
        c = Fraction(c)
        return cls._raw(Poly.const(nvars, c.numerator), Poly.const(nvars, c.denominator))

    @classmethod
    def zero(cls, nvars):
        return cls.const(nvars, 0)

    @classmethod
    def one(cls, nvars):
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars, i):
        return cls._raw(Poly.var(nvars, i), Poly.const(nvars, 1))

    @property
    def nvars(self):
        return self.num.nvars

    def is_zero(self):
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self):
        return self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise RingError("not a constant")
        return self.num.constant_value() / self.den.constant_value()

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.nvars != self.nvars:
                raise RingError("ring mismatch")
            return other
        if isinstance(other, (int, Rational)):
            return RatFunc.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num.terms or not other.num.terms:
            return RatFunc.zero(self.nvars)
        if self.is_constant():
            if self.num.constant_value() == self.den.constant_value():
                return other
        elif other.is_constant() and other.num.constant_value() == other.den.constant_value():
            return self
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num.terms:
            raise RingError("division by zero in F")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFunc.const(self.nvars, other) / self

    def __pow__(self, n):
        if n < 0:
            return RatFunc.one(self.nvars) / (self ** (-n))
        return RatFunc._raw(self.num ** n, self.den ** n) if n else RatFunc.one(self.nvars)

    def partial(self, i):
        """``d/dx_{i+1}`` by the quotient rule (``i`` is 0-based)."""
        if not 0 <= i < self.nvars:
            raise RingError("unknown variable")
        dn = self.num.partial(i)
        if self.den.is_constant():
            return RatFunc(dn, self.den)
        dd = self.den.partial(i)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def compose(self, subs):
        """Substitute ``x_i -> subs[i]`` (a sequence of RatFunc over a common ring)."""
        if len(subs) != self.nvars:
            raise RingError("ring mismatch")
        if not subs:
            return self
        k = subs[0].nvars
        num = _eval_poly(self.num, subs, k)
        den = _eval_poly(self.den, subs, k)
        if den.is_zero():
            raise RingError("division by zero in F")
        return num / den

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = RatFunc.const(self.nvars, other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def format(self, names=None):
        n = self.num.format(names)
        if self.den.is_constant() and self.den.constant_value() == 1:
            return n
        if len(self.num.terms) > 1:
            n = f"({n})"
        d = self.den.format(names)
        if not self.den.is_constant():
            exp, c = self.den.leading()
            if len(self.den.terms) > 1 or c != 1 or sum(1 for k in exp if k) > 1:
                d = f"({d})"
        return f"{n}/{d}"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RatFunc({self.format()!r})"


def _eval_poly(p, subs, k):
    total = RatFunc.zero(k)
    powers = [dict() for _ in subs]
    for exp, c in p.terms.items():
        term = RatFunc.const(k, c)
        for i, e in enumerate(exp):
            if e:
                cache = powers[i]
                if e not in cache:
                    cache[e] = subs[i] ** e
                term = term * cache[e]
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Operation-level API


def rf_normalize(n, d):
    """Canonical RatFunc for ``n/d``; raises on zero ``d``."""
    return RatFunc(n, d)


def rf_arith(a, b, kind):
    if a.nvars != b.nvars:
        raise RingError("ring mismatch")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def rf_partial(f, i):
    """``d/dx_i f`` with a 1-based derivation index."""
    if not 1 <= i <= f.nvars:
        raise RingError("unknown variable")
    return f.partial(i - 1)


def rf_equal(a, b):
    if a.nvars != b.nvars:
        raise RingError("ring mismatch")
    return (a - b).is_zero()


# ---------------------------------------------------------------------------
# Text syntax: integers, variable names, + - * / ^, parentheses.


def _tokenize(text):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            yield ("int", text[i:j], i)
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield ("name", text[i:j], i)
            i = j
        elif ch in "+-*/^()":
            yield ("op", ch, i)
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", column=i + 1)
    yield ("end", "", n)


class _ExprParser:
    def __init__(self, text, names):
        self.tokens = list(_tokenize(text))
        self.pos = 0
        self.names = {name: k for k, name in enumerate(names)}
        self.m = len(names)

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, column=tok[2] + 1)

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        value = self.sum()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return value

    def sum(self):
        value = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def product(self):
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise self.error("division by zero in F", tok)
                value = value / rhs
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            value = self.unary()
            return -value if tok[1] == "-" else value
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                raise self.error("exponent must be a non-negative integer", tok)
            return base ** int(tok[1])
        return base

    def atom(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "int":
            return RatFunc.const(self.m, int(text))
        if kind == "name":
            if text not in self.names:
                raise self.error(f"unknown variable {text!r}", tok)
            return RatFunc.var(self.m, self.names[text])
        if kind == "op" and text == "(":
            value = self.sum()
            close = self.take()
            if close[1] != ")":
                raise self.error("expected ')'", close)
            return value
        raise self.error(f"unexpected {text!r}" if text else "unexpected end of expression", tok)


def parse_ratfunc(text, names):
    """Parse ``text`` as a rational function in the variables ``names``."""
    return _ExprParser(text, tuple(names)).parse()
