"""Subspaces of ``A``, annihilators and involutivity tests.

Three independent procedures decide involutivity of a subspace ``E``:
closure of the generators under the bracket (``involutive_direct``), the
obstruction table of a completed coframe (``frobenius_certificate``) and the
exterior-system test on the ideal generated by the annihilator
(``eas_check``).  ``cartan_equivalence`` runs all three and insists they agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import linalg
from .coeffring import RatFunc
from .errors import FormError, InternalCheckError, SubspaceError
from .extcalc import Form, ext_diff, form_eval, is_closed, wedge, zero_form
from .gla import CheckResult, Element, bracket

__all__ = [
    "Subspace",
    "FrobeniusCertificate",
    "IdealSpec",
    "EASResult",
    "CartanReport",
    "SymplecticReport",
    "annihilator",
    "involutive_direct",
    "frobenius_certificate",
    "eas_check",
    "cartan_equivalence",
    "symplectic_check",
]


class Subspace:
    """The span of ``generators`` over the fraction field of ``F``."""

    def __init__(self, algebra, generators):
        self.algebra = algebra
        gens = []
        for g in generators:
            if not isinstance(g, Element):
                g = algebra.element(g)
            if g.algebra != algebra:
                raise SubspaceError("generator from a different algebra")
            gens.append(g)
        self.generators = tuple(gens)

    @property
    def r(self):
        return len(self.generators)

    def matrix(self):
        """``r x p`` coefficient matrix."""
        return [list(g.coeffs) for g in self.generators]

    def check(self):
        A = self.algebra
        if self.r > A.p:
            raise SubspaceError(f"degenerate generating set: {self.r} generators in dimension {A.p}")
        if self.r:
            rk = linalg.rank(self.matrix(), A.p)
            if rk < self.r:
                raise SubspaceError(f"degenerate generating set: rank {rk} < {self.r}")

    def __repr__(self):
        return "Subspace<" + ", ".join(g.format() for g in self.generators) + ">"


def _one_form(A, vec):
    return Form(A, 1, {(k,): v for k, v in enumerate(vec) if v})


def annihilator(E):
    """Independent 1-forms vanishing on ``E``, from the kernel of its generator matrix."""
    E.check()
    A = E.algebra
    if E.r == 0:
        return [_one_form(A, [A.one() if k == a else A.zero() for k in range(A.p)]) for a in range(A.p)]
    return [_one_form(A, v) for v in linalg.nullspace(E.matrix(), A.p, A.m)]


def _in_span(E, u):
    A = E.algebra
    cols = [[g.coeffs[k] for g in E.generators] for k in range(A.p)]
    return linalg.solve(cols, list(u.coeffs), E.r, A.m) is not None


def involutive_direct(E):
    """``(verdict, witnesses)``; a witness is ``(a, b, [s_a, s_b])`` with 1-based indices."""
    E.check()
    witnesses = []
    for a, b in itertools.combinations(range(E.r), 2):
        br = bracket(E.generators[a], E.generators[b])
        if not _in_span(E, br):
            witnesses.append((a + 1, b + 1, br))
    return not witnesses, witnesses


@dataclass
class FrobeniusCertificate:
    basis: list
    coframe: list
    r: int
    obstruction: dict  # (alpha, b, c) -> A^alpha_bc, 1-based, nonzero entries only
    B: dict
    C: dict
    omega: dict = field(default_factory=dict)  # (alpha, gamma) -> 1-form
    involutive: bool = False

    def format_obstruction(self):
        return [f"A^{a}_{b}{c} = {v.format(self.coframe[0].algebra.names)}"
                for (a, b, c), v in sorted(self.obstruction.items())]


def _complete_basis(E):
    A = E.algebra
    basis = [list(g.coeffs) for g in E.generators]
    rk = len(basis)
    for k in range(A.p):
        if rk == A.p:
            break
        cand = basis + [[A.one() if j == k else A.zero() for j in range(A.p)]]
        if linalg.rank(cand, A.p) > rk:
            basis = cand
            rk += 1
    return basis


def frobenius_certificate(E):
    """Complete ``E`` to a basis, read off the obstruction table and build the certificate."""
    E.check()
    A = E.algebra
    r, p = E.r, A.p
    basis = _complete_basis(E)
    S = [[basis[b][k] for b in range(p)] for k in range(p)]
    Sinv = linalg.inverse(S, A.m)
    if Sinv is None:
        raise InternalCheckError("basis completion produced a singular matrix")
    theta = [_one_form(A, Sinv[a]) for a in range(p)]
    elems = [Element(A, tuple(v)) for v in basis]
    obstruction, B, C = {}, {}, {}
    dtheta = {}
    for a in range(r, p):
        dt = ext_diff(theta[a])
        dtheta[a] = dt
        for b, c in itertools.combinations(range(p), 2):
            v = form_eval(dt, elems[b], elems[c])
            if not v:
                continue
            if c < r:
                obstruction[(a + 1, b + 1, c + 1)] = v
            elif b < r:
                B[(a + 1, b + 1, c + 1)] = v
            else:
                C[(a + 1, b + 1, c + 1)] = v
    cert = FrobeniusCertificate(basis, theta, r, obstruction, B, C)
    if obstruction:
        return cert
    half = RatFunc.const(A.m, 1) / RatFunc.const(A.m, 2)
    for a in range(r, p):
        for g in range(r, p):
            w = zero_form(A, 1)
            for b in range(r):
                v = B.get((a + 1, b + 1, g + 1))
                if v:
                    w = w + theta[b].scale(v)
            for be in range(r, p):
                if be < g:
                    v = C.get((a + 1, be + 1, g + 1))
                elif be > g:
                    v = C.get((a + 1, g + 1, be + 1))
                    v = -v if v else None
                else:
                    v = None
                if v:
                    w = w + theta[be].scale(half * v)
            cert.omega[(a + 1, g + 1)] = w
        recon = zero_form(A, 2)
        for g in range(r, p):
            recon = recon + wedge(cert.omega[(a + 1, g + 1)], theta[g])
        if recon != dtheta[a]:
            raise InternalCheckError("certificate reconstruction failed")
    cert.involutive = True
    return cert


@dataclass
class IdealSpec:
    """Ideal generated by ``generators``; membership is checked up to ``degree_cap``."""

    generators: list
    degree_cap: int | None = None

    def __post_init__(self):
        gens = list(self.generators)
        if gens and any(g.algebra != gens[0].algebra for g in gens):
            raise FormError("ideal generators from different algebras")
        self.generators = gens

    def required_cap(self):
        return max((g.degree for g in self.generators), default=0) + 1


@dataclass
class EASResult:
    vanishing: CheckResult
    closure: CheckResult

    @property
    def passed(self):
        return self.vanishing.passed and self.closure.passed


def _in_ideal(target, gens):
    """Solve ``target = sum_j eta_j ^ g_j`` for coefficient forms ``eta_j``."""
    A = target.algebra
    q = target.degree
    if target.is_zero():
        return True
    columns = []
    for g in gens:
        k = q - g.degree
        if k < 0 or g.is_zero():
            continue
        for I in itertools.combinations(range(A.p), k):
            columns.append(wedge(Form(A, k, {I: A.one()}), g))
    if not columns:
        return False
    rows_idx = list(itertools.combinations(range(A.p), q))
    mat = [[col.coeffs.get(K, A.zero()) for col in columns] for K in rows_idx]
    rhs = [target.coeffs.get(K, A.zero()) for K in rows_idx]
    return linalg.solve(mat, rhs, len(columns), A.m) is not None


def eas_check(ideal, E):
    """Vanishing of the ideal on ``E`` together with closure of the ideal under ``d``."""
    E.check()
    gens = [g for g in ideal.generators]
    for g in gens:
        if g.algebra != E.algebra:
            raise FormError("algebra mismatch")
    need = ideal.required_cap()
    cap = need if ideal.degree_cap is None else ideal.degree_cap
    if cap < need:
        raise SubspaceError(f"raise degree cap: need at least {need}, got {cap}")
    witness = None
    for j, g in enumerate(gens):
        for label, form in ((f"g{j + 1}", g), (f"d g{j + 1}", ext_diff(g))):
            if form.degree > E.r or form.is_zero():
                continue
            for I in itertools.combinations(range(E.r), form.degree):
                v = form_eval(form, *(E.generators[i] for i in I))
                if v:
                    args = ",".join(f"s{i + 1}" for i in I)
                    witness = f"{label}({args}) = {v.format(E.algebra.names)}"
                    break
            if witness:
                break
        if witness:
            break
    vanishing = CheckResult("eas_vanishing", witness is None, witness)
    witness = None
    for j, g in enumerate(gens):
        if not _in_ideal(ext_diff(g), gens):
            witness = f"d g{j + 1} not in ideal"
            break
    closure = CheckResult("eas_closure", witness is None, witness)
    return EASResult(vanishing, closure)


@dataclass
class CartanReport:
    direct: bool
    direct_witnesses: list
    certificate: FrobeniusCertificate
    eas: EASResult

    @property
    def involutive(self):
        return self.direct


def cartan_equivalence(E, degree_cap=None):
    """Run the three involutivity procedures and check that their verdicts agree."""
    direct, wits = involutive_direct(E)
    cert = frobenius_certificate(E)
    ideal = IdealSpec(annihilator(E), degree_cap)
    eas = eas_check(ideal, E)
    if not (direct == cert.involutive == eas.passed):
        raise InternalCheckError(
            f"theorem equivalence violated: direct={direct} frobenius={cert.involutive} eas={eas.passed}"
        )
    return CartanReport(direct, wits, cert, eas)


@dataclass
class SymplecticReport:
    closed: bool
    determinant: RatFunc
    even_dimension: bool

    @property
    def nondegenerate(self):
        return bool(self.determinant)

    @property
    def symplectic(self):
        return self.closed and self.nondegenerate


def symplectic_check(omega):
    """Closedness and nondegeneracy of a 2-form; nondegeneracy needs even ``p``."""
    if omega.degree != 2:
        raise FormError(f"symplectic check needs a 2-form, got degree {omega.degree}")
    A = omega.algebra
    mat = [[omega.component((a, b)) for b in range(A.p)] for a in range(A.p)]
    return SymplecticReport(is_closed(omega), linalg.det(mat, A.m), A.p % 2 == 0)
