"""Parser for the plain-text definition files read by the command line tool.

A file is a sequence of ``[kind name]`` sections holding ``key = value``
lines.  ``#`` starts a comment.  Example::

    [ring]
    vars = x

    [diffeo h]
    forward = x + 1
    inverse = x - 1

    [algebra A]
    use = tangent_line
    deform = h

    [element u]
    coeffs = x^2

    [form w]
    degree = 1
    t 1 = 1/x

Algebra sections either name a constructor with ``use`` (``heisenberg``,
``sl2``, ``tangent_line``, ``abelian(p)``, ``der_plus_f``,
``bullet(row; row; ...)``) or list ``dim = p`` followed by
``L a b c = expr`` and ``rho a i = expr`` entries (1-based; ``L a b c`` also
sets ``L b a c``).  ``deform = h`` and ``pullback = h`` lines apply diffeo
pairs in order.  Elements ``t1..tp`` of every algebra are predeclared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .coeffring import RatFunc, default_names, parse_ratfunc
from .errors import GLAError, ParseError
from .extcalc import Form, Morphism
from .gla import (
    abelian,
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
from .idsys import Subspace

__all__ = ["DefinitionFile", "parse_definition"]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_KINDS = ("ring", "algebra", "diffeo", "element", "form", "subspace", "morphism")


@dataclass
class DefinitionFile:
    names: tuple = ()
    algebras: dict = field(default_factory=dict)
    diffeos: dict = field(default_factory=dict)
    elements: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)
    subspaces: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)

    @property
    def m(self):
        return len(self.names)


@dataclass
class _Line:
    no: int
    key: str
    value: str
    vcol: int  # 1-based column where the value starts


@dataclass
class _Section:
    kind: str
    name: str | None
    no: int
    lines: list


def _split(text):
    sections = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", no, len(raw) - len(raw.lstrip()) + 1)
            parts = stripped[1:-1].split()
            if not parts or parts[0] not in _KINDS or len(parts) > 2:
                raise ParseError(f"unknown section header {stripped}", no, 1)
            name = parts[1] if len(parts) == 2 else None
            if name is not None and not _NAME.match(name):
                raise ParseError(f"invalid name {name!r}", no, 1)
            sections.append(_Section(parts[0], name, no, []))
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", no, len(line) - len(line.lstrip()) + 1)
        if not sections:
            raise ParseError("entry outside of any section", no, 1)
        key, value = line.split("=", 1)
        vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
        sections[-1].lines.append(_Line(no, " ".join(key.split()), value.strip(), vcol))
    return sections


class _Builder:
    def __init__(self):
        self.out = DefinitionFile()

    # -- helpers -------------------------------------------------------

    def expr(self, line, text=None, offset=0):
        text = line.value if text is None else text
        try:
            return parse_ratfunc(text, self.out.names)
        except ParseError as exc:
            col = line.vcol + offset + (exc.column - 1 if exc.column else 0)
            raise ParseError(exc.message, line.no, col) from None
        except GLAError as exc:
            raise ParseError(str(exc), line.no, line.vcol + offset) from None

    def exprs(self, line, text=None, sep=",", offset=0):
        text = line.value if text is None else text
        out, pos = [], 0
        for piece in text.split(sep):
            lead = len(piece) - len(piece.lstrip())
            out.append(self.expr(line, piece.strip(), offset + pos + lead))
            pos += len(piece) + 1
        return out

    def integer(self, line, text=None):
        text = line.value if text is None else text
        try:
            return int(text)
        except ValueError:
            raise ParseError(f"expected an integer, got {text!r}", line.no, line.vcol) from None

    def lookup(self, table, kind, name, line, col=None):
        if name not in table:
            raise ParseError(f"undeclared {kind} {name!r}", line.no, col or line.vcol)
        return table[name]

    def algebra_of(self, sec):
        for line in sec.lines:
            if line.key == "algebra":
                return self.lookup(self.out.algebras, "algebra", line.value, line)
        if len(self.out.algebras) == 1:
            return next(iter(self.out.algebras.values()))
        if not self.out.algebras:
            raise ParseError("no algebra declared yet", sec.no, 1)
        raise ParseError("ambiguous algebra: add 'algebra = NAME'", sec.no, 1)

    def element(self, A, name, line, col):
        if name in self.out.elements:
            u = self.out.elements[name]
            if u.algebra != A:
                raise ParseError(f"element {name!r} belongs to another algebra", line.no, col)
            return u
        m = re.fullmatch(r"t(\d+)", name)
        if m and 1 <= int(m.group(1)) <= A.p:
            return A.basis(int(m.group(1)) - 1)
        raise ParseError(f"undeclared element {name!r}", line.no, col)

    def unknown_key(self, sec, line):
        raise ParseError(f"unknown key {line.key!r} in [{sec.kind}] section", line.no, 1)

    @staticmethod
    def indices(line, key, prefix, count):
        parts = key.split()
        if parts[0] != prefix or len(parts) != count + 1 or not all(x.isdigit() for x in parts[1:]):
            return None
        return [int(x) for x in parts[1:]]

    # -- sections ------------------------------------------------------

    def ring(self, sec):
        if self.out.algebras or self.out.diffeos:
            raise ParseError("[ring] must come before algebras and diffeos", sec.no, 1)
        for line in sec.lines:
            if line.key != "vars":
                self.unknown_key(sec, line)
            names = tuple(v.strip() for v in line.value.split(",") if v.strip())
            for n in names:
                if not _NAME.match(n) or re.fullmatch(r"t\d+", n):
                    raise ParseError(f"invalid variable name {n!r}", line.no, line.vcol)
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable name", line.no, line.vcol)
            self.out.names = names

    def diffeo(self, sec):
        fwd = inv = None
        for line in sec.lines:
            if line.key == "forward":
                fwd = self.exprs(line)
            elif line.key == "inverse":
                inv = self.exprs(line)
            else:
                self.unknown_key(sec, line)
        if fwd is None or inv is None:
            raise ParseError("diffeo needs 'forward' and 'inverse'", sec.no, 1)
        try:
            return diffeo_pair(fwd, inv)
        except GLAError as exc:
            raise ParseError(str(exc), sec.no, 1) from None

    def constructor(self, line):
        m, names = self.out.m, self.out.names or None
        text = line.value
        call = re.fullmatch(r"([a-z_0-9]+)\s*(?:\((.*)\))?", text, re.S)
        if not call:
            raise ParseError(f"bad constructor {text!r}", line.no, line.vcol)
        ctor, args = call.group(1), call.group(2)
        offset = text.index("(") + 1 if args is not None else 0
        if ctor in ("heisenberg", "sl2"):
            if m:
                raise ParseError(f"{ctor} is defined over the rationals; remove [ring] variables", line.no, line.vcol)
            return heisenberg() if ctor == "heisenberg" else sl2()
        if ctor == "tangent_line":
            if m != 1:
                raise ParseError("tangent_line needs exactly one ring variable", line.no, line.vcol)
            return tangent_line(names)
        if ctor == "der_plus_f":
            return ctor_der_plus_f(m, names)
        if ctor == "abelian":
            return abelian(self.integer(line, (args or "").strip()), m, names)
        if ctor == "bullet":
            if args is None:
                raise ParseError("bullet needs a matrix argument", line.no, line.vcol)
            rows, pos = [], 0
            for row in args.split(";"):
                rows.append(self.exprs(line, row, offset=offset + pos))
                pos += len(row) + 1
            return ctor_bullet(rows, names)
        raise ParseError(f"unknown constructor {ctor!r}", line.no, line.vcol)

    def algebra(self, sec):
        m = self.out.m
        A = None
        dim = None
        L = anchor = None
        pending = []
        set_entries = {}
        for line in sec.lines:
            if line.key == "use":
                if A is not None or dim is not None:
                    raise ParseError("algebra already defined", line.no, 1)
                A = self.constructor(line)
            elif line.key == "dim":
                if A is not None or dim is not None:
                    raise ParseError("algebra already defined", line.no, 1)
                dim = self.integer(line)
                if dim < 1:
                    raise ParseError("dimension must be positive", line.no, line.vcol)
                zero = RatFunc.zero(m)
                L = [[[zero] * dim for _ in range(dim)] for _ in range(dim)]
                anchor = [[zero] * m for _ in range(dim)]
            elif line.key.startswith("L ") or line.key.startswith("rho "):
                if dim is None:
                    raise ParseError("structure entries need 'dim' first", line.no, 1)
                if line.key.startswith("L "):
                    idx = self.indices(line, line.key, "L", 3)
                    if idx is None or not all(1 <= i <= dim for i in idx):
                        raise ParseError(f"bad structure index {line.key!r}", line.no, 1)
                    a, b, c = (i - 1 for i in idx)
                    v = self.expr(line)
                    clash = (a == b and v) or (
                        (b, a, c) in set_entries and set_entries[(b, a, c)] != -v
                    )
                    if clash:
                        raise ParseError(f"antisymmetry violated at ({a + 1},{b + 1},{c + 1})", line.no, 1)
                    set_entries[(a, b, c)] = v
                    L[a][b][c] = v
                    L[b][a][c] = -v
                else:
                    parts = line.key.split()
                    if len(parts) != 3 or not parts[1].isdigit():
                        raise ParseError(f"bad anchor entry {line.key!r}", line.no, 1)
                    a = int(parts[1]) - 1
                    var = parts[2]
                    if var.isdigit():
                        i = int(var) - 1
                    elif var in self.out.names:
                        i = self.out.names.index(var)
                    else:
                        raise ParseError(f"undeclared variable {var!r}", line.no, 1)
                    if not (0 <= a < dim and 0 <= i < m):
                        raise ParseError(f"bad anchor index {line.key!r}", line.no, 1)
                    anchor[a][i] = self.expr(line)
            elif line.key in ("deform", "pullback"):
                pending.append(line)
            else:
                self.unknown_key(sec, line)
        try:
            if dim is not None:
                A = build_algebra(m, dim, anchor, L, names=self.out.names or None)
            if A is None:
                raise ParseError("algebra needs 'use' or 'dim'", sec.no, 1)
            for line in pending:
                h = self.lookup(self.out.diffeos, "diffeo", line.value, line)
                A = ctor_deform_diffeo(A, h) if line.key == "deform" else ctor_pullback_chart(A, h)
        except ParseError:
            raise
        except GLAError as exc:
            raise ParseError(str(exc), sec.no, 1) from None
        return A

    def element_sec(self, sec):
        A = self.algebra_of(sec)
        coeffs = None
        for line in sec.lines:
            if line.key == "coeffs":
                coeffs = self.exprs(line)
                if len(coeffs) != A.p:
                    raise ParseError(f"expected {A.p} coefficients, got {len(coeffs)}", line.no, line.vcol)
            elif line.key != "algebra":
                self.unknown_key(sec, line)
        if coeffs is None:
            raise ParseError("element needs 'coeffs'", sec.no, 1)
        return A.element(coeffs)

    def form_sec(self, sec):
        A = self.algebra_of(sec)
        degree = None
        terms = []
        for line in sec.lines:
            if line.key == "degree":
                degree = self.integer(line)
                if degree < 0:
                    raise ParseError("negative degree", line.no, line.vcol)
            elif line.key.split()[0] == "t":
                idx = [x for x in line.key.split()[1:]]
                if not all(x.isdigit() and 1 <= int(x) <= A.p for x in idx):
                    raise ParseError(f"bad form index {line.key!r}", line.no, 1)
                terms.append((line, tuple(int(x) - 1 for x in idx)))
            elif line.key != "algebra":
                self.unknown_key(sec, line)
        if degree is None:
            raise ParseError("form needs 'degree'", sec.no, 1)
        parsed = []
        for line, idx in terms:
            if len(idx) != degree:
                raise ParseError(f"form of degree {degree} given {len(idx)} indices", line.no, 1)
            parsed.append((idx, self.expr(line)))
        return Form.from_terms(A, degree, parsed)

    def subspace_sec(self, sec):
        A = self.algebra_of(sec)
        gens = None
        for line in sec.lines:
            if line.key == "gens":
                gens, pos = [], 0
                for piece in line.value.split(","):
                    col = line.vcol + pos + len(piece) - len(piece.lstrip())
                    gens.append(self.element(A, piece.strip(), line, col))
                    pos += len(piece) + 1
            elif line.key != "algebra":
                self.unknown_key(sec, line)
        if gens is None:
            raise ParseError("subspace needs 'gens'", sec.no, 1)
        return Subspace(A, gens)

    def morphism_sec(self, sec):
        src = tgt = None
        images = {}
        for line in sec.lines:
            if line.key == "source":
                src = self.lookup(self.out.algebras, "algebra", line.value, line)
            elif line.key == "target":
                tgt = self.lookup(self.out.algebras, "algebra", line.value, line)
            elif line.key.startswith("image"):
                idx = self.indices(line, line.key, "image", 1)
                if idx is None:
                    raise ParseError(f"bad image entry {line.key!r}", line.no, 1)
                images[idx[0]] = line
            else:
                self.unknown_key(sec, line)
        if src is None or tgt is None:
            raise ParseError("morphism needs 'source' and 'target'", sec.no, 1)
        cols = []
        for a in range(1, src.p + 1):
            if a not in images:
                raise ParseError(f"missing 'image {a}'", sec.no, 1)
            col = self.exprs(images[a])
            if len(col) != tgt.p:
                raise ParseError(f"expected {tgt.p} coefficients", images[a].no, images[a].vcol)
            cols.append(col)
        extra = set(images) - set(range(1, src.p + 1))
        if extra:
            line = images[min(extra)]
            raise ParseError(f"image index {min(extra)} out of range", line.no, 1)
        matrix = [[cols[a][b] for a in range(src.p)] for b in range(tgt.p)]
        try:
            return Morphism(src, tgt, matrix)
        except GLAError as exc:
            raise ParseError(str(exc), sec.no, 1) from None

    def build(self, sections):
        out = self.out
        tables = {
            "algebra": (out.algebras, self.algebra),
            "diffeo": (out.diffeos, self.diffeo),
            "element": (out.elements, self.element_sec),
            "form": (out.forms, self.form_sec),
            "subspace": (out.subspaces, self.subspace_sec),
            "morphism": (out.morphisms, self.morphism_sec),
        }
        seen = set()
        for sec in sections:
            if sec.kind == "ring":
                self.ring(sec)
                continue
            name = sec.name
            if name is None:
                if sec.kind != "algebra":
                    raise ParseError(f"[{sec.kind}] section needs a name", sec.no, 1)
                name = "A"
            if name in seen:
                raise ParseError(f"duplicate name {name!r}", sec.no, 1)
            seen.add(name)
            table, fn = tables[sec.kind]
            table[name] = fn(sec)
        if not out.names:
            out.names = default_names(0)
        return out


def parse_definition(text):
    """Parse a definition file into a :class:`DefinitionFile`."""
    return _Builder().build(_split(text))
