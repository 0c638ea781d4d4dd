"""Command line front end: ``glacalc <command> --file PATH [options] [targets...]``.

Exit status is 0 on success, 1 when a decision command finds a mathematical
failure, 2 on usage or parse errors and 3 when an internal self-check trips.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .deffile import parse_definition
from .errors import GLAError, InternalCheckError, ParseError
from .extcalc import (
    ce_exactness,
    cohomology_dims,
    ext_diff,
    form_eval,
    interior,
    lie_derivative,
    maurer_cartan,
    pullback,
    validate_morphism,
    wedge,
)
from .gla import validate_axioms
from .idsys import (
    IdealSpec,
    annihilator,
    cartan_equivalence,
    eas_check,
    frobenius_certificate,
    involutive_direct,
    symplectic_check,
)

COMMANDS = (
    "validate", "mc", "eval", "d", "wedge", "lie", "interior", "pullback",
    "annihilator", "involutive", "frobenius", "cartan", "eas", "symplectic", "cohomology",
)
# commands whose exit status reflects a verdict
DECISIONS = {"validate", "mc", "involutive", "frobenius", "cartan", "eas", "symplectic"}


class UsageError(Exception):
    pass


@dataclass
class Record:
    name: str
    verdict: str  # "pass" or "fail"
    payload: str | None = None


class Report:
    def __init__(self, command, opts):
        self.command = command
        self.opts = opts
        self.records = []

    def add(self, name, passed, payload=None):
        self.records.append(Record(name, "pass" if passed else "fail", payload))

    def value(self, name, payload):
        self.records.append(Record(name, "pass", payload))

    @property
    def passed(self):
        return all(r.verdict == "pass" for r in self.records)

    def render(self, machine):
        o = self.opts
        lines = []
        if machine:
            lines.append(f"command={self.command} seed={o.seed} samples={o.samples}")
            for r in self.records:
                lines.append(f"check={r.name} verdict={r.verdict} witness={r.payload if r.payload is not None else '-'}")
            lines.append(f"status={'pass' if self.passed else 'fail'}")
        else:
            lines.append(f"glacalc {self.command} (seed {o.seed}, samples {o.samples})")
            for r in self.records:
                if self.command in DECISIONS:
                    tail = f": {r.payload}" if r.payload is not None else ""
                    lines.append(f"  [{r.verdict}] {r.name}{tail}")
                else:
                    lines.append(f"  {r.name} = {r.payload}")
            lines.append(f"overall: {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"


def _get(table, kind, name):
    if name not in table:
        raise UsageError(f"unknown {kind} {name!r}")
    return table[name]


def _element(defs, name, algebra=None):
    if name in defs.elements:
        return defs.elements[name]
    if algebra is not None and name.startswith("t") and name[1:].isdigit():
        a = int(name[1:])
        if 1 <= a <= algebra.p:
            return algebra.basis(a - 1)
    raise UsageError(f"unknown element {name!r}")


def _need(targets, n, usage):
    if len(targets) != n:
        raise UsageError(f"expected {usage}")


def _algebra_targets(defs, targets):
    if not targets:
        if not defs.algebras:
            raise UsageError("no algebra declared")
        return list(defs.algebras.items())
    return [(t, _get(defs.algebras, "algebra", t)) for t in targets]


def _subspace_targets(defs, targets):
    if not targets:
        if not defs.subspaces:
            raise UsageError("no subspace declared")
        return list(defs.subspaces.items())
    return [(t, _get(defs.subspaces, "subspace", t)) for t in targets]


def _fmt(form):
    return form.format()


def cmd_validate(defs, targets, opts, rep):
    if not targets:
        targets = list(defs.algebras) + list(defs.morphisms)
    for name in targets:
        if name in defs.algebras:
            report = validate_axioms(defs.algebras[name], opts.samples, opts.seed)
        elif name in defs.morphisms:
            report = validate_morphism(defs.morphisms[name], opts.samples, opts.seed)
        else:
            raise UsageError(f"unknown algebra or morphism {name!r}")
        for c in report.checks:
            rep.add(f"{name}.{c.name}", c.passed, c.witness)


def cmd_mc(defs, targets, opts, rep):
    for name, A in _algebra_targets(defs, targets):
        for eq in maurer_cartan(A):
            key = eq.label.replace("d ", "", 1)
            payload = eq.format() + (" [equal]" if eq.equal else f" [expected {_fmt(eq.rhs)}]")
            rep.add(f"{name}.mc.{key}", eq.equal, payload)


def cmd_eval(defs, targets, opts, rep):
    if not targets:
        raise UsageError("expected FORM ELEMENT...")
    w = _get(defs.forms, "form", targets[0])
    args = [_element(defs, t, w.algebra) for t in targets[1:]]
    rep.value(f"{targets[0]}({','.join(targets[1:])})", form_eval(w, *args).format(w.algebra.names))


def cmd_d(defs, targets, opts, rep):
    _need(targets, 1, "FORM")
    rep.value(f"d {targets[0]}", _fmt(ext_diff(_get(defs.forms, "form", targets[0]))))


def cmd_wedge(defs, targets, opts, rep):
    _need(targets, 2, "FORM FORM")
    a, b = (_get(defs.forms, "form", t) for t in targets)
    rep.value(f"{targets[0]}∧{targets[1]}", _fmt(wedge(a, b)))


def _elem_form(defs, targets):
    _need(targets, 2, "ELEMENT FORM")
    w = _get(defs.forms, "form", targets[1])
    return _element(defs, targets[0], w.algebra), w


def cmd_lie(defs, targets, opts, rep):
    z, w = _elem_form(defs, targets)
    rep.value(f"L_{targets[0]} {targets[1]}", _fmt(lie_derivative(z, w)))


def cmd_interior(defs, targets, opts, rep):
    z, w = _elem_form(defs, targets)
    rep.value(f"i_{targets[0]} {targets[1]}", _fmt(interior(z, w)))


def cmd_pullback(defs, targets, opts, rep):
    _need(targets, 2, "MORPHISM FORM")
    phi = _get(defs.morphisms, "morphism", targets[0])
    w = _get(defs.forms, "form", targets[1])
    rep.value(f"{targets[0]}^* {targets[1]}", _fmt(pullback(phi, w)))


def cmd_annihilator(defs, targets, opts, rep):
    for name, E in _subspace_targets(defs, targets):
        forms = annihilator(E)
        rep.value(f"{name}.annihilator", "; ".join(_fmt(f) for f in forms) or "0")


def _pair_witness(E, wits):
    names = E.algebra.names
    return "; ".join(f"[s{a},s{b}] = {br.format(names)} not in E" for a, b, br in wits)


def cmd_involutive(defs, targets, opts, rep):
    for name, E in _subspace_targets(defs, targets):
        ok, wits = involutive_direct(E)
        rep.add(f"{name}.involutive", ok, None if ok else _pair_witness(E, wits))


def _certificate_records(name, cert, rep):
    rep.add(f"{name}.frobenius", cert.involutive,
            None if cert.involutive else ", ".join(cert.format_obstruction()))
    if cert.involutive:
        for (a, g), w in sorted(cert.omega.items()):
            rep.value(f"{name}.omega^{a}_{g}", _fmt(w))
    for a in range(cert.r, len(cert.coframe)):
        rep.value(f"{name}.theta^{a + 1}", _fmt(cert.coframe[a]))


def cmd_frobenius(defs, targets, opts, rep):
    for name, E in _subspace_targets(defs, targets):
        _certificate_records(name, frobenius_certificate(E), rep)


def cmd_cartan(defs, targets, opts, rep):
    for name, E in _subspace_targets(defs, targets):
        res = cartan_equivalence(E, opts.degree_cap)
        rep.add(f"{name}.direct", res.direct, None if res.direct else _pair_witness(E, res.direct_witnesses))
        cert = res.certificate
        rep.add(f"{name}.frobenius", cert.involutive,
                None if cert.involutive else ", ".join(cert.format_obstruction()))
        for c in (res.eas.vanishing, res.eas.closure):
            rep.add(f"{name}.{c.name}", c.passed, c.witness)


def cmd_eas(defs, targets, opts, rep):
    if not targets:
        raise UsageError("expected SUBSPACE [FORM...]")
    E = _get(defs.subspaces, "subspace", targets[0])
    if len(targets) > 1:
        gens = [_get(defs.forms, "form", t) for t in targets[1:]]
    else:
        gens = annihilator(E)
    res = eas_check(IdealSpec(gens, opts.degree_cap), E)
    for c in (res.vanishing, res.closure):
        rep.add(f"{targets[0]}.{c.name}", c.passed, c.witness)


def cmd_symplectic(defs, targets, opts, rep):
    if targets:
        items = [(t, _get(defs.forms, "form", t)) for t in targets]
    else:
        items = [(n, w) for n, w in defs.forms.items() if w.degree == 2]
        if not items:
            raise UsageError("no 2-form declared")
    for name, w in items:
        res = symplectic_check(w)
        rep.add(f"{name}.closed", res.closed)
        det = res.determinant.format(w.algebra.names)
        note = "" if res.even_dimension else " (odd dimension, never nondegenerate)"
        rep.add(f"{name}.nondegenerate", res.nondegenerate, f"det = {det}{note}")


def cmd_cohomology(defs, targets, opts, rep):
    if not targets:
        targets = list(defs.algebras)
    for t in targets:
        if t in defs.algebras:
            for q, (z, b, h) in enumerate(cohomology_dims(defs.algebras[t])):
                rep.value(f"{t}.H^{q}", f"{h} (cocycles {z}, coboundaries {b})")
        else:
            eta = ce_exactness(_get(defs.forms, "algebra or form", t))
            rep.value(f"{t}.primitive", "not exact" if eta is None else _fmt(eta))


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def build_parser():
    ap = argparse.ArgumentParser(prog="glacalc", description="Exact calculus on generalized Lie algebras.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("targets", nargs="*", help="names declared in the definition file")
    ap.add_argument("--file", required=True, help="definition file")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=16)
    ap.add_argument("--degree-cap", type=int, default=None)
    ap.add_argument("--machine", action="store_true", help="emit key=value records")
    return ap


def run(command, defs, opts):
    """Execute ``command`` on a parsed definition file and return the report."""
    if opts.samples < 0:
        raise UsageError("--samples must be non-negative")
    rep = Report(command, opts)
    HANDLERS[command](defs, list(opts.targets), opts, rep)
    return rep


def main(argv=None):
    ap = build_parser()
    try:
        opts = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        with open(opts.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {opts.file}: {exc.strerror}", file=sys.stderr)
        return 2
    try:
        defs = parse_definition(text)
        rep = run(opts.command, defs, opts)
    except ParseError as exc:
        print(f"error: {opts.file}: {exc}", file=sys.stderr)
        return 2
    except InternalCheckError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, GLAError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(rep.render(opts.machine))
    if opts.command in DECISIONS and not rep.passed:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
