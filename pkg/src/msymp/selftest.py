"""Embedded identity suite: runs the engine's defining identities on small
bundles with seeded random inputs and prints a pass/fail table.

This is a fast smoke battery (a few instances per identity); the exhaustive
randomized runs live in the test suite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .bracket import (
    HamiltonianNm1Form,
    HamiltonianPair,
    bracket,
    bracket_coords,
    bracket_naive,
    certify_pair,
    decide_hamiltonian,
    graded_bracket,
    jacobi_defect,
)
from .exterior import (
    Form,
    MultiVector,
    basis_vector,
    contract,
    kernel_at_point,
    lie_derivative,
    one_form,
    schouten,
)
from .phase import (
    Bundle,
    HorizontalNm1Form,
    ProjectableVF,
    dnx_mu,
    lift_cojet,
    make_bundle,
    momentum_map,
    momentum_map_closed_form,
    omega,
    theta,
    volume_form,
)
from .poly import ENERGY, Point, Poly

DEFAULT_BUNDLES = ((1, 1), (2, 1), (2, 2))


def _rand_poly(rng, sysm, axes, max_deg=2, maxterms=2) -> Poly:
    p = Poly.zero(sysm)
    for _ in range(rng.randint(1, maxterms)):
        m: dict[int, int] = {}
        for _ in range(rng.randint(0, max_deg)):
            a = rng.choice(axes)
            m[a] = m.get(a, 0) + 1
        p = p + Poly(sysm, {tuple(sorted(m.items())): Fraction(rng.randint(-2, 3))})
    return p


def _axes(b: Bundle):
    sysm = b.phase
    x_axes = [sysm.axis(b.x(mu)) for mu in range(1, b.n + 1)]
    q_axes = [sysm.axis(b.q(i)) for i in range(1, b.N + 1)]
    return x_axes, q_axes


def _rand_vf(rng, b: Bundle, vertical=False) -> ProjectableVF:
    x_axes, q_axes = _axes(b)
    base = {} if vertical else {
        mu: _rand_poly(rng, b.phase, x_axes) for mu in range(1, b.n + 1)}
    fib = {i: _rand_poly(rng, b.phase, x_axes + q_axes) for i in range(1, b.N + 1)}
    return ProjectableVF(b, base, fib)


def _rand_hform(rng, b: Bundle) -> HamiltonianNm1Form:
    from .bracket import build_hamiltonian_form

    x_axes, q_axes = _axes(b)
    f0 = HorizontalNm1Form(b, {
        mu: _rand_poly(rng, b.phase, x_axes + q_axes) for mu in range(1, b.n + 1)})
    return build_hamiltonian_form(
        _rand_vf(rng, b, vertical=(rng.random() < 0.25)), f0)


def _rand_form(rng, b: Bundle, degree: int) -> Form:
    from itertools import combinations

    sysm = b.phase
    keys = list(combinations(range(sysm.dim), degree))
    terms = {}
    for _ in range(2):
        k = rng.choice(keys)
        terms[k] = _rand_poly(rng, sysm, list(range(sysm.dim)))
    return Form(sysm, degree, terms)


def _rand_mv(rng, b: Bundle, degree: int) -> MultiVector:
    from itertools import combinations

    sysm = b.phase
    keys = list(combinations(range(sysm.dim), degree))
    terms = {}
    for _ in range(2):
        k = rng.choice(keys)
        terms[k] = _rand_poly(rng, sysm, list(range(sysm.dim)))
    return MultiVector(sysm, degree, terms)


def _rand_point(rng, b: Bundle) -> Point:
    return Point(b.phase, {
        c: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for c in b.phase.coords})


# -- the checks -----------------------------------------------------------------


def check_dimension(rng, b: Bundle) -> bool:
    return b.dim == (b.N + 1) * (b.n + 1) and len(b.phase.coords) == \
        b.n + b.N + b.n * b.N + 1


def check_canonical_forms(rng, b: Bundle) -> bool:
    # the explicit sum dq^i ^ dp_i^mu ^ dnx_mu + dp ^ dnx against -d theta
    sysm = b.phase
    explicit = one_form(sysm, ENERGY).wedge(volume_form(b))
    for i in range(1, b.N + 1):
        for mu in range(1, b.n + 1):
            explicit = explicit + one_form(sysm, b.q(i)).wedge(
                one_form(sysm, b.p(i, mu))).wedge(dnx_mu(b, mu))
    om = omega(b)
    return (om - explicit).is_zero() and om.d().is_zero() \
        and (om + theta(b).d()).is_zero()


def check_lift_invariance(rng, b: Bundle, m=3) -> bool:
    th, om = theta(b), omega(b)
    for t in range(m):
        x = _rand_vf(rng, b, vertical=(t == 0))
        lifted = lift_cojet(x)
        if not lie_derivative(lifted, th).is_zero():
            return False
        if not lie_derivative(lifted, om).is_zero():
            return False
    return True


def check_momentum_map(rng, b: Bundle, m=3) -> bool:
    om = omega(b)
    for t in range(m):
        x = _rand_vf(rng, b, vertical=(t == 0))
        j = momentum_map(x)
        if not (j - momentum_map_closed_form(x)).is_zero():
            return False
        if not (j.d() - contract(lift_cojet(x), om)).is_zero():
            return False
    return True


def check_hamiltonian_certification(rng, b: Bundle, m=3) -> bool:
    om = omega(b)
    for _ in range(m):
        f = _rand_hform(rng, b)
        if not (contract(f.vector_field(), om) - f.form.d()).is_zero():
            return False
        if not isinstance(decide_hamiltonian(b, f.form), HamiltonianPair):
            return False
    if b.n == 1:
        # omega is symplectic in mechanics: every 0-form is Hamiltonian and
        # there is no affine constraint to violate
        return True
    # a non-affine counterexample must be rejected
    sysm = b.phase
    bad = dnx_mu(b, 1).scale(Poly.var(sysm, ENERGY) * Poly.var(sysm, b.p(1, 1)))
    return not isinstance(decide_hamiltonian(b, bad), HamiltonianPair)


def check_defect_identity(rng, b: Bundle, m=2) -> bool:
    for _ in range(m):
        f, g, h = (_rand_hform(rng, b) for _ in range(3))
        try:
            jacobi_defect(f, g, h)
        except Exception:
            return False
    return True


def check_bracket_antisymmetry(rng, b: Bundle, m=3) -> bool:
    for _ in range(m):
        f, g = _rand_hform(rng, b), _rand_hform(rng, b)
        if not (bracket(f, g).value.form + bracket(g, f).value.form).is_zero():
            return False
    return True


def check_bracket_jacobi(rng, b: Bundle, m=2) -> bool:
    for _ in range(m):
        f, g, h = (_rand_hform(rng, b) for _ in range(3))
        total = bracket(f, bracket(g, h).value).value.form \
            + bracket(g, bracket(h, f).value).value.form \
            + bracket(h, bracket(f, g).value).value.form
        if not total.is_zero():
            return False
    return True


def check_coordinate_oracle(rng, b: Bundle, m=3) -> bool:
    for _ in range(m):
        f, g = _rand_hform(rng, b), _rand_hform(rng, b)
        if not (bracket_coords(f, g) - bracket(f, g).value.form).is_zero():
            return False
    return True


def check_field_relation(rng, b: Bundle, m=3) -> bool:
    om = omega(b)
    for _ in range(m):
        f, g = _rand_hform(rng, b), _rand_hform(rng, b)
        lie = schouten(f.vector_field(), g.vector_field())
        if not (contract(-lie, om) - bracket(f, g).value.form.d()).is_zero():
            return False
        if not (contract(-lie, om) - bracket_naive(f, g).d()).is_zero():
            return False
    return True


def check_schouten_relations(rng, b: Bundle, m=2) -> bool:
    for p in (1, 2):
        for q in (1, 2):
            for _ in range(m):
                x = _rand_mv(rng, b, p)
                y = _rand_mv(rng, b, q)
                adeg = min(p + q, b.dim)
                a = _rand_form(rng, b, adeg)
                s = -1 if ((p - 1) * q) % 2 else 1
                lhs = contract(schouten(x, y), a)
                rhs = lie_derivative(x, contract(y, a)).scale(s) \
                    - contract(y, lie_derivative(x, a))
                if not (lhs - rhs).is_zero():
                    return False
                s2 = -1 if ((p - 1) * (q - 1)) % 2 else 1
                lhs2 = lie_derivative(schouten(x, y), a)
                rhs2 = lie_derivative(x, lie_derivative(y, a)).scale(s2) \
                    - lie_derivative(y, lie_derivative(x, a))
                if not (lhs2 - rhs2).is_zero():
                    return False
    return True


def check_graded_bracket(rng, b: Bundle, m=3) -> bool:
    from .bracket import GradedBracketMismatch

    for _ in range(m):
        f, g = _rand_hform(rng, b), _rand_hform(rng, b)
        F = certify_pair(b, f.form, f.vector_field())
        G = certify_pair(b, g.form, g.vector_field())
        if b.n % 2:
            # at odd n the two displayed expressions genuinely disagree; the
            # contract is that the mismatch is surfaced, never ignored
            try:
                value = graded_bracket(F, G)
            except GradedBracketMismatch:
                continue
            if not value.is_zero():
                return False
            continue
        value = graded_bracket(F, G)  # raises if the two expressions differ
        if not (value - bracket(f, g).value.form).is_zero():
            return False
    return True


def check_vector_kernel(rng, b: Bundle, m=2) -> bool:
    om = omega(b)
    for _ in range(m):
        pt = _rand_point(rng, b)
        if kernel_at_point(om, 1, pt).dimension != 0:
            return False
    return True


CHECKS = [
    ("dimension formula", check_dimension),
    ("omega = -d theta (explicit sum)", check_canonical_forms),
    ("lift invariance L theta = L omega = 0", check_lift_invariance),
    ("momentum map dual route", check_momentum_map),
    ("hamiltonian certification i_X omega = df", check_hamiltonian_certification),
    ("naive-bracket defect identity", check_defect_identity),
    ("corrected bracket antisymmetry", check_bracket_antisymmetry),
    ("corrected bracket jacobi", check_bracket_jacobi),
    ("coordinate bracket oracle", check_coordinate_oracle),
    ("bracket field relation", check_field_relation),
    ("schouten contraction/derivative relations", check_schouten_relations),
    ("graded bracket consistency", check_graded_bracket),
    ("omega vector kernel trivial", check_vector_kernel),
]


@dataclass
class SelftestRow:
    name: str
    bundle: str
    passed: bool


def run_selftest(bundles=DEFAULT_BUNDLES) -> tuple[bool, list[SelftestRow], str]:
    """Run the identity suite; returns (all_passed, rows, rendered table)."""
    rows: list[SelftestRow] = []
    bundle_objs = [make_bundle(n, N) for (n, N) in bundles]
    for name, fn in CHECKS:
        for bobj in bundle_objs:
            rng = random.Random(1000 * bobj.n + 100 * bobj.N + len(name))
            passed = bool(fn(rng, bobj))
            rows.append(SelftestRow(name=name, bundle=f"({bobj.n},{bobj.N})",
                                    passed=passed))
    width = max(len(name) for name, _ in CHECKS) + 2
    headers = [f"({n},{N})" for (n, N) in bundles]
    lines = ["check".ljust(width) + "  ".join(h.rjust(6) for h in headers)]
    ok = True
    for name, _ in CHECKS:
        cells = []
        for (n, N) in bundles:
            row = next(r for r in rows
                       if r.name == name and r.bundle == f"({n},{N})")
            cells.append(("pass" if row.passed else "FAIL").rjust(6))
            ok = ok and row.passed
        lines.append(name.ljust(width) + "  ".join(cells))
    lines.append("")
    lines.append(f"result: {'PASS' if ok else 'FAIL'} "
                 f"({len(CHECKS)} checks, {len(bundles)} bundles)")
    return ok, rows, "\n".join(lines) + "\n"
