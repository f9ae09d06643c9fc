"""Hamiltonian (n-1)-forms, their vector fields, and the Poisson brackets.

A Hamiltonian (n-1)-form is kept together with its component data

    f = f^mu dnx_mu + 1/2 f_i^{mu nu} dq^i ^ dnx_{mu nu},   f_i^{mu nu} = -f_i^{nu mu},

and optionally with the generator triple (X, f0, c) it was built from.  The
associated vector field is produced by the component formula (the unique
solution of i_X omega = df when one exists; omega is nondegenerate on vector
fields) and is always certified against that defining relation before being
returned.

Three brackets are provided: the naive bracket i_{X_g} i_{X_f} omega, the
corrected bracket with its exact correction term, and the graded bracket on
certified form/multivector pairs of arbitrary degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exterior import (
    Form,
    MultiVector,
    basis_vector,
    contract,
    is_closed,
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
    dnx_munu,
    momentum_map,
    momentum_map_closed_form,
    omega,
    theta,
)
from .poly import ENERGY, Point, Poly


class NotHamiltonianError(ValueError):
    """The form is outside the Hamiltonian (n-1)-form class."""


class CertificationError(RuntimeError):
    """i_X omega = df failed for a form that was expected to be Hamiltonian."""


class UncertifiedPairError(ValueError):
    """A graded-bracket operand does not satisfy i_X omega = dF."""


class GradedBracketMismatch(RuntimeError):
    """The two defining expressions of the graded bracket disagreed."""


# -- basis bookkeeping ---------------------------------------------------------


def _single_term(form: Form) -> tuple[tuple[int, ...], Fraction]:
    [(key, coeff)] = form.terms.items()
    return key, coeff.constant_value()


def _conforming_blades(b: Bundle):
    """Keys and signs of the blades dnx_mu and dq^i ^ dnx_{mu nu} (mu < nu):
    blade = sign * dxi_key in the canonical exterior basis."""
    mu_blades = {}
    for mu in range(1, b.n + 1):
        key, sign = _single_term(dnx_mu(b, mu))
        mu_blades[mu] = (key, sign)
    q_blades = {}
    for i in range(1, b.N + 1):
        dq = one_form(b.phase, b.q(i))
        for mu in range(1, b.n + 1):
            for nu in range(mu + 1, b.n + 1):
                blade = dq.wedge(dnx_munu(b, mu, nu))
                key, sign = _single_term(blade)
                q_blades[(i, mu, nu)] = (key, sign)
    return mu_blades, q_blades


_BLADE_CACHE: dict[tuple[int, int], tuple] = {}


def _blades(b: Bundle):
    got = _BLADE_CACHE.get((b.n, b.N))
    if got is None:
        got = _conforming_blades(b)
        _BLADE_CACHE[(b.n, b.N)] = got
    return got


def split_components(b: Bundle, a: Form) -> tuple[dict, dict, Form]:
    """Split an (n-1)-form into (f_mu, f_imn with mu < nu, non-conforming rest)."""
    if a.degree != b.n - 1:
        raise ValueError(f"expected degree {b.n - 1}, got {a.degree}")
    mu_blades, q_blades = _blades(b)
    f_mu: dict[int, Poly] = {}
    f_imn: dict[tuple[int, int, int], Poly] = {}
    used_keys = set()
    for mu, (key, sign) in mu_blades.items():
        c = a.coeff(key)
        if not c.is_zero():
            f_mu[mu] = c.scale(sign)
        used_keys.add(key)
    for (i, mu, nu), (key, sign) in q_blades.items():
        c = a.coeff(key)
        if not c.is_zero():
            f_imn[(i, mu, nu)] = c.scale(sign)
        used_keys.add(key)
    rest_terms = {k: p for k, p in a.terms.items() if k not in used_keys}
    rest = Form(b.phase, a.degree, rest_terms)
    return f_mu, f_imn, rest


def assemble_form(b: Bundle, f_mu: dict, f_imn: dict) -> Form:
    """Inverse of split_components for the conforming part."""
    out = Form.zero(b.phase, b.n - 1)
    mu_blades, q_blades = _blades(b)
    for mu, p in f_mu.items():
        key, sign = mu_blades[mu]
        out = out + Form(b.phase, b.n - 1, {key: p.scale(sign)})
    for imn, p in f_imn.items():
        key, sign = q_blades[imn]
        out = out + Form(b.phase, b.n - 1, {key: p.scale(sign)})
    return out


class HamiltonianNm1Form:
    """An (n-1)-form in the Hamiltonian class, with component access."""

    __slots__ = ("bundle", "form", "f_mu", "f_imn", "generators", "_vf")

    def __init__(self, bundle: Bundle, form: Form, f_mu: dict, f_imn: dict,
                 generators=None):
        self.bundle = bundle
        self.form = form
        self.f_mu = f_mu
        self.f_imn = f_imn
        self.generators = generators
        self._vf = None

    @classmethod
    def from_form(cls, b: Bundle, a: Form) -> "HamiltonianNm1Form":
        """Wrap a raw (n-1)-form.  Any non-conforming part must be closed
        (it then contributes nothing to df and rides along)."""
        f_mu, f_imn, rest = split_components(b, a)
        if not rest.is_zero() and not is_closed(rest):
            raise NotHamiltonianError(
                "non-conforming part is not closed; the form cannot be Hamiltonian"
            )
        return cls(b, a, f_mu, f_imn)

    @classmethod
    def from_form_with_field(cls, b: Bundle, a: Form,
                             field: MultiVector) -> "HamiltonianNm1Form":
        """Wrap a form whose Hamiltonian vector field is already known; the
        field is certified against i_X omega = da and stored.  Used for
        bracket values, which may carry exact non-conforming remainders that
        the component route cannot see."""
        if not (contract(field, omega(b)) - a.d()).is_zero():
            raise CertificationError("provided field fails i_X omega = df")
        f_mu, f_imn, _ = split_components(b, a)
        obj = cls(b, a, f_mu, f_imn)
        obj._vf = field
        return obj

    def component_mu(self, mu: int) -> Poly:
        return self.f_mu.get(mu, Poly.zero(self.bundle.phase))

    def component_imn(self, i: int, mu: int, nu: int) -> Poly:
        if mu == nu:
            return Poly.zero(self.bundle.phase)
        if mu < nu:
            return self.f_imn.get((i, mu, nu), Poly.zero(self.bundle.phase))
        return -self.f_imn.get((i, nu, mu), Poly.zero(self.bundle.phase))

    def vector_field(self) -> MultiVector:
        if self._vf is None:
            self._vf = hamiltonian_vf(self)
        return self._vf

    def __repr__(self) -> str:
        return f"HamiltonianNm1Form({self.form!r})"


def build_hamiltonian_form(x: ProjectableVF, f0: HorizontalNm1Form | None = None,
                           c: Form | None = None) -> HamiltonianNm1Form:
    """f = J(X) + pullback(f0) + c with c closed; the three-contribution
    construction of Hamiltonian (n-1)-forms."""
    b = x.bundle
    sysm = b.phase
    if f0 is None:
        f0 = HorizontalNm1Form(b)
    if c is not None:
        if c.degree != b.n - 1:
            raise ValueError("closed part has wrong degree")
        if not is_closed(c):
            raise ValueError("third contribution must be a closed form")
    form = momentum_map(x) + f0.pullback()
    f_mu: dict[int, Poly] = {}
    for mu in range(1, b.n + 1):
        comp = f0.comp(mu) - Poly.var(sysm, ENERGY) * x.base(mu)
        for i in range(1, b.N + 1):
            comp = comp + Poly.var(sysm, b.p(i, mu)) * x.fiber(i)
        if not comp.is_zero():
            f_mu[mu] = comp
    f_imn: dict[tuple[int, int, int], Poly] = {}
    for i in range(1, b.N + 1):
        for mu in range(1, b.n + 1):
            for nu in range(mu + 1, b.n + 1):
                comp = -(Poly.var(sysm, b.p(i, mu)) * x.base(nu)
                         - Poly.var(sysm, b.p(i, nu)) * x.base(mu))
                if not comp.is_zero():
                    f_imn[(i, mu, nu)] = comp
    if assemble_form(b, f_mu, f_imn) != form:
        raise AssertionError("component display disagrees with contraction route")
    if c is not None and not c.is_zero():
        cf_mu, cf_imn, _ = split_components(b, c)
        for mu, p in cf_mu.items():
            f_mu[mu] = f_mu.get(mu, Poly.zero(sysm)) + p
        for imn, p in cf_imn.items():
            f_imn[imn] = f_imn.get(imn, Poly.zero(sysm)) + p
        f_mu = {k: v for k, v in f_mu.items() if not v.is_zero()}
        f_imn = {k: v for k, v in f_imn.items() if not v.is_zero()}
        form = form + c
    return HamiltonianNm1Form(b, form, f_mu, f_imn, generators=(x, f0, c))


def _candidate_field(f: HamiltonianNm1Form) -> MultiVector:
    """The component formula for X_f:

        -df^mu/dp d/dx^mu + (1/n) df^mu/dp_i^mu d/dq^i
        - (df^mu/dq^i - df_i^{mu nu}/dx^nu) d/dp_i^mu + df^mu/dx^mu d/dp.
    """
    b = f.bundle
    sysm = b.phase
    out = MultiVector.zero(sysm, 1)
    for mu in range(1, b.n + 1):
        comp = -f.component_mu(mu).partial(ENERGY)
        if not comp.is_zero():
            out = out + basis_vector(sysm, b.x(mu)).scale(comp)
    inv_n = Fraction(1, b.n)
    for i in range(1, b.N + 1):
        acc = Poly.zero(sysm)
        for mu in range(1, b.n + 1):
            acc = acc + f.component_mu(mu).partial(b.p(i, mu))
        if not acc.is_zero():
            out = out + basis_vector(sysm, b.q(i)).scale(acc.scale(inv_n))
    for i in range(1, b.N + 1):
        for mu in range(1, b.n + 1):
            acc = f.component_mu(mu).partial(b.q(i))
            for nu in range(1, b.n + 1):
                acc = acc - f.component_imn(i, mu, nu).partial(b.x(nu))
            if not acc.is_zero():
                out = out - basis_vector(sysm, b.p(i, mu)).scale(acc)
    acc = Poly.zero(sysm)
    for mu in range(1, b.n + 1):
        acc = acc + f.component_mu(mu).partial(b.x(mu))
    if not acc.is_zero():
        out = out + basis_vector(sysm, ENERGY).scale(acc)
    return out


def hamiltonian_vf(f: HamiltonianNm1Form) -> MultiVector:
    """The Hamiltonian vector field of f; aborts unless i_X omega = df holds
    exactly for the constructed candidate."""
    x = _candidate_field(f)
    if not (contract(x, omega(f.bundle)) - f.form.d()).is_zero():
        raise CertificationError(
            "candidate field failed i_X omega = df; input is not Hamiltonian"
        )
    return x


@dataclass
class HamiltonianPair:
    """A form F and multivector X with i_X omega = dF, certified exactly."""

    bundle: Bundle
    form: Form
    field: MultiVector
    certified: bool = True


@dataclass
class NotHamiltonian:
    """Verdict for decide_hamiltonian failures."""

    residual: Form | None
    non_conforming: Form | None
    reason: str


def decide_hamiltonian(b: Bundle, a: Form) -> HamiltonianPair | NotHamiltonian:
    """Build the candidate vector field for an (n-1)-form and certify it, or
    report why the form is not Hamiltonian."""
    f_mu, f_imn, rest = split_components(b, a)
    if not rest.is_zero() and not is_closed(rest):
        return NotHamiltonian(
            residual=None,
            non_conforming=rest,
            reason="non-conforming part is not closed",
        )
    wrapped = HamiltonianNm1Form(b, a, f_mu, f_imn)
    x = _candidate_field(wrapped)
    residual = contract(x, omega(b)) - a.d()
    if residual.is_zero():
        return HamiltonianPair(bundle=b, form=a, field=x)
    return NotHamiltonian(residual=residual, non_conforming=None,
                          reason="candidate failed i_X omega = df")


# -- the brackets ---------------------------------------------------------------


def bracket_naive(f: HamiltonianNm1Form, g: HamiltonianNm1Form) -> Form:
    """{f,g}' = i_{X_g} i_{X_f} omega."""
    b = f.bundle
    if g.bundle is not b:
        raise ValueError("mixed bundles")
    return contract(g.vector_field(), contract(f.vector_field(), omega(b)))


@dataclass
class BracketResult:
    """Corrected bracket with its naive part and exact correction kept apart."""

    value: HamiltonianNm1Form
    naive_part: Form
    correction_part: Form
    primitive: Form  # correction_part = d(primitive)


def bracket(f: HamiltonianNm1Form, g: HamiltonianNm1Form) -> BracketResult:
    """{f,g} = i_{X_g} i_{X_f} omega + d(i_{X_g} f - i_{X_f} g - i_{X_g} i_{X_f} theta).

    The value is again Hamiltonian and satisfies [X_f, X_g] = -X_{{f,g}}."""
    b = f.bundle
    if g.bundle is not b:
        raise ValueError("mixed bundles")
    xf = f.vector_field()
    xg = g.vector_field()
    naive = contract(xg, contract(xf, omega(b)))
    primitive = contract(xg, f.form) - contract(xf, g.form) \
        - contract(xg, contract(xf, theta(b)))
    correction = primitive.d()
    if correction.is_zero():
        correction = Form.zero(b.phase, b.n - 1)
    value = HamiltonianNm1Form.from_form_with_field(
        b, naive + correction, -schouten(xf, xg)
    )
    return BracketResult(value=value, naive_part=naive,
                         correction_part=correction, primitive=primitive)


def _transport_density(x: ProjectableVF, comps, mu: int) -> Poly:
    """mu-component of the Lie derivative of a horizontal density h^mu dnx_mu
    along a projectable field: X(h^mu) - h^nu dX^mu/dx^nu + h^mu dX^nu/dx^nu."""
    b = x.bundle
    acc = Poly.zero(b.phase)
    for nu in range(1, b.n + 1):
        acc = acc + x.base(nu) * comps(mu).partial(b.x(nu))
        acc = acc - comps(nu) * x.base(mu).partial(b.x(nu))
        acc = acc + comps(mu) * x.base(nu).partial(b.x(nu))
    for i in range(1, b.N + 1):
        acc = acc + x.fiber(i) * comps(mu).partial(b.q(i))
    return acc


def bracket_coords(f: HamiltonianNm1Form, g: HamiltonianNm1Form) -> Form:
    """The closed-form coordinate expression of the corrected bracket,
    evaluated directly from the generator data (X, f0), (Y, g0):

        {f,g} = -(p_i^mu [X,Y]^i - p [X,Y]^mu) dnx_mu
                + 1/2 (p_i^mu [X,Y]^nu - p_i^nu [X,Y]^mu) dq^i ^ dnx_{mu nu}
                + (L_Y f0^mu - L_X g0^mu) dnx_mu

    i.e. minus the Noether current of the Lie bracket of the generators plus
    the mutual Lie transport of the horizontal parts (as (n-1)-form
    densities).  Serves as an independent oracle for bracket()."""
    b = f.bundle
    if g.bundle is not b:
        raise ValueError("mixed bundles")
    for h in (f, g):
        if h.generators is None:
            raise ValueError("bracket_coords needs generator triples")
        c = h.generators[2]
        if c is not None and not c.is_zero():
            raise ValueError("bracket_coords needs zero closed parts")
    x, f0 = f.generators[0], f.generators[1]
    y, g0 = g.generators[0], g.generators[1]
    xy = x.lie_bracket(y)
    out = -momentum_map_closed_form(xy)
    for mu in range(1, b.n + 1):
        coeff = _transport_density(y, f0.comp, mu) - _transport_density(x, g0.comp, mu)
        if not coeff.is_zero():
            out = out + dnx_mu(b, mu).scale(coeff)
    return out


def jacobi_defect(f: HamiltonianNm1Form, g: HamiltonianNm1Form,
                  h: HamiltonianNm1Form) -> Form:
    """d(i_{X_f} i_{X_g} i_{X_h} d theta), the exact (n-1)-form by which the
    naive bracket misses the Jacobi identity; asserted against the
    independently expanded cyclic sum.

    (Contracting the n-form theta itself three times would drop the degree to
    n-3 and cannot match the (n-1)-form cyclic sum; the derivative of theta
    is the only degree-consistent reading, and the assertion below checks it
    exactly.)"""
    b = f.bundle
    dth = theta(b).d()
    triple = contract(f.vector_field(),
                      contract(g.vector_field(),
                               contract(h.vector_field(), dth)))
    defect = triple.d()
    cyc = Form.zero(b.phase, b.n - 1)
    for (a1, a2, a3) in ((f, g, h), (g, h, f), (h, f, g)):
        inner = HamiltonianNm1Form.from_form_with_field(
            b, bracket_naive(a2, a3),
            -schouten(a2.vector_field(), a3.vector_field()),
        )
        cyc = cyc + bracket_naive(a1, inner)
    if not (cyc - defect).is_zero():
        raise CertificationError(
            "naive-bracket cyclic sum does not match its exact defect form"
        )
    return defect


# -- graded bracket on certified pairs ------------------------------------------


def certify_pair(b: Bundle, form: Form, field: MultiVector) -> HamiltonianPair:
    """Check i_X omega = dF exactly and return the certified pair."""
    if not (contract(field, omega(b)) - form.d()).is_zero():
        raise UncertifiedPairError("i_X omega = dF fails for the given pair")
    return HamiltonianPair(bundle=b, form=form, field=field)


def graded_bracket(F: HamiltonianPair, G: HamiltonianPair) -> Form:
    """The degree-graded bracket of certified pairs:

        {f,g} = (-1)^{(p-1)(q-1)} L_{X_g} f - L_{X_f} g + (-1)^{q-1} L_{X_g ^ X_f} theta

    computed together with its contraction-shaped second expression

        (-1)^p i_{X_f} i_{X_g} omega
          + d[(-1)^{(p-1)(q-1)} i_{X_g} f - i_{X_f} g + (-1)^{q-1} i_{X_f} i_{X_g} theta];

    both are evaluated and must agree exactly.  For (n-1)-form pairs with
    vector partners this reproduces bracket()."""
    b = F.bundle
    if G.bundle is not b:
        raise ValueError("mixed bundles")
    for pair in (F, G):
        if not pair.certified or not (contract(pair.field, omega(b)) - pair.form.d()).is_zero():
            raise UncertifiedPairError("graded bracket needs certified pairs")
    p = F.form.degree
    q = G.form.degree
    s_pq = -1 if ((p - 1) * (q - 1)) % 2 else 1
    s_q = -1 if (q - 1) % 2 else 1
    s_p = -1 if p % 2 else 1
    th = theta(b)
    om = omega(b)
    expr1 = lie_derivative(G.field, F.form).scale(s_pq) \
        - lie_derivative(F.field, G.form) \
        + lie_derivative(G.field.wedge(F.field), th).scale(s_q)
    inner = contract(G.field, F.form).scale(s_pq) - contract(F.field, G.form) \
        + contract(F.field, contract(G.field, th)).scale(s_q)
    expr2 = contract(F.field, contract(G.field, om)).scale(s_p) + inner.d()
    if not (expr1 - expr2).is_zero():
        raise GradedBracketMismatch(
            "the two defining expressions of the graded bracket disagree"
        )
    if expr1.is_zero():
        rdeg = min(max(p + q - b.n + 1, 0), b.dim)
        return Form.zero(b.phase, rdeg)
    return expr1


def graded_bracket_pair(F: HamiltonianPair, G: HamiltonianPair) -> HamiltonianPair:
    """The graded bracket together with a certified partner field, used for
    nesting (graded Jacobi checks).  The partner is +-[X_f, X_g]; the sign is
    selected by certification."""
    value = graded_bracket(F, G)
    cand = schouten(F.field, G.field)
    for s in (1, -1):
        z = cand.scale(s)
        if (contract(z, omega(F.bundle)) - value.d()).is_zero():
            return HamiltonianPair(bundle=F.bundle, form=value, field=z)
    raise UncertifiedPairError(
        "no sign of the Schouten bracket certifies the graded bracket value"
    )


def graded_jacobi_sum(F: HamiltonianPair, G: HamiltonianPair,
                      H: HamiltonianPair) -> Form:
    """The cyclic graded Jacobi sum in the shifted grading s = (n-1) - deg:

        (-1)^{s_f s_h} {F,{G,H}} + (-1)^{s_g s_f} {G,{H,F}} + (-1)^{s_h s_g} {H,{F,G}}

    which is the zero form for certified triples."""
    b = F.bundle
    n = b.n
    ps = (F, G, H)
    sig = [n - 1 - P.form.degree for P in ps]
    total: Form | None = None
    for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        inner = graded_bracket_pair(ps[j], ps[k])
        s = -1 if (sig[i] * sig[k]) % 2 else 1
        term = graded_bracket(ps[i], inner).scale(s)
        total = term if total is None else total + term
    return total


# -- Poisson-form kernel condition ----------------------------------------------


@dataclass
class PoissonVerdict:
    poisson: bool
    points_checked: int
    degrees: tuple[int, ...]
    counterexample: tuple[int, int, MultiVector] | None = None  # (pt index, degree, Z)


def kernel_annihilates(b: Bundle, F: Form, pts: list[Point],
                       degrees: tuple[int, ...] | None = None) -> PoissonVerdict:
    """Check, at each sample point and each multivector degree, that every
    constant multivector in the kernel of omega also annihilates F."""
    if not pts:
        raise ValueError("need at least one sample point")
    om = omega(b)
    if degrees is None:
        degrees = tuple(r for r in range(1, b.n + 1) if r <= F.degree)
    for k, pt in enumerate(pts):
        f0 = F.evaluate(pt)
        for r in degrees:
            if r > om.degree:
                continue
            kern = kernel_at_point(om, r, pt)
            for z in kern.basis:
                if not contract(z, f0).is_zero():
                    return PoissonVerdict(False, len(pts), degrees,
                                          counterexample=(k, r, z))
    return PoissonVerdict(True, len(pts), degrees)


def is_poisson_form(F: HamiltonianPair, pts: list[Point]) -> PoissonVerdict:
    """Poisson-form condition: i_Z omega = 0 implies i_Z F = 0, sampled at
    rational points for every multivector degree 1..n."""
    degrees = tuple(r for r in range(1, F.bundle.n + 1))
    return kernel_annihilates(F.bundle, F.form, pts, degrees)
