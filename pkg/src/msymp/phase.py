"""Multisymplectic phase space over a fibre bundle with n base and N fibre
dimensions: coordinate inventories, the canonical forms, lifts of projectable
vector fields, and the multimomentum map (Noether currents).

The phase space carries coordinates (x^mu, q^i, p_i^mu, p) in canonical order
Base(1..n), Fiber(1..N), Momentum row-major, Energy; its dimension is
(N+1)(n+1).  The jet space carries (x^mu, q^i, v_i^mu) and is kept as a
separate inventory so variable-dependence invariants cannot be corrupted.

Sign conventions are fixed by the canonical n-form

    theta = p_i^mu dq^i ^ dnx_mu - p dnx,        omega = -d theta,

and every lift/momentum formula below is the unique one satisfying
L_X theta = 0 and i_X omega = dJ for those forms (see CONVENTIONS.md).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exterior import Form, MultiVector, basis_vector, contract, one_form
from .poly import (
    Coordinate,
    CoordKind,
    CoordSystem,
    ENERGY,
    Poly,
    base,
    fiber,
    jet_velocity,
    momentum,
)


class ProjectabilityError(ValueError):
    """A vector-field component depends on forbidden coordinates."""


@dataclass(frozen=True)
class Bundle:
    """The pair (n, N) with its derived coordinate inventories."""

    n: int
    N: int
    phase: CoordSystem = field(compare=False, repr=False)
    jet: CoordSystem = field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return self.phase.dim

    def x(self, mu: int) -> Coordinate:
        self._check_mu(mu)
        return base(mu)

    def q(self, i: int) -> Coordinate:
        self._check_i(i)
        return fiber(i)

    def p(self, i: int, mu: int) -> Coordinate:
        self._check_i(i)
        self._check_mu(mu)
        return momentum(i, mu)

    @property
    def en(self) -> Coordinate:
        return ENERGY

    def v(self, i: int, mu: int) -> Coordinate:
        self._check_i(i)
        self._check_mu(mu)
        return jet_velocity(i, mu)

    def _check_mu(self, mu: int) -> None:
        if not 1 <= mu <= self.n:
            raise ValueError(f"base index {mu} out of range 1..{self.n}")

    def _check_i(self, i: int) -> None:
        if not 1 <= i <= self.N:
            raise ValueError(f"fibre index {i} out of range 1..{self.N}")


@lru_cache(maxsize=None)
def make_bundle(n: int, N: int) -> Bundle:
    if n < 1 or N < 1:
        raise ValueError("bundle dimensions must be >= 1")
    phase_coords = (
        [base(mu) for mu in range(1, n + 1)]
        + [fiber(i) for i in range(1, N + 1)]
        + [momentum(i, mu) for i in range(1, N + 1) for mu in range(1, n + 1)]
        + [ENERGY]
    )
    jet_coords = (
        [base(mu) for mu in range(1, n + 1)]
        + [fiber(i) for i in range(1, N + 1)]
        + [jet_velocity(i, mu) for i in range(1, N + 1) for mu in range(1, n + 1)]
    )
    b = Bundle(
        n=n,
        N=N,
        phase=CoordSystem(f"phase space (n={n}, N={N})", phase_coords),
        jet=CoordSystem(f"jet space (n={n}, N={N})", jet_coords),
    )
    return b


# -- canonical forms ----------------------------------------------------------


def volume_form(b: Bundle) -> Form:
    """dnx = dx^1 ^ ... ^ dx^n."""
    out = Form(b.phase, 0, {(): Poly.const(b.phase, 1)})
    for mu in range(1, b.n + 1):
        out = out.wedge(one_form(b.phase, b.x(mu)))
    return out


def dnx_mu(b: Bundle, mu: int) -> Form:
    """dnx_mu = i_{e_mu} dnx."""
    return contract(basis_vector(b.phase, b.x(mu)), volume_form(b))


def dnx_munu(b: Bundle, mu: int, nu: int) -> Form:
    """dnx_{mu nu} = i_{e_nu} i_{e_mu} dnx (antisymmetric in mu, nu)."""
    return contract(basis_vector(b.phase, b.x(nu)), dnx_mu(b, mu))


@lru_cache(maxsize=None)
def theta(b: Bundle) -> Form:
    """The canonical n-form p_i^mu dq^i ^ dnx_mu - p dnx."""
    sysm = b.phase
    out = volume_form(b).scale(-Poly.var(sysm, ENERGY))
    for i in range(1, b.N + 1):
        dq = one_form(sysm, b.q(i))
        for mu in range(1, b.n + 1):
            out = out + dq.wedge(dnx_mu(b, mu)).scale(Poly.var(sysm, b.p(i, mu)))
    return out


@lru_cache(maxsize=None)
def omega(b: Bundle) -> Form:
    """The multisymplectic (n+1)-form, omega = -d theta."""
    return -theta(b).d()


# -- projectable vector fields ------------------------------------------------


_BASE_ONLY = {CoordKind.BASE}
_BASE_FIBER = {CoordKind.BASE, CoordKind.FIBER}


class ProjectableVF:
    """A vector field on E with base components X^mu(x) and fibre components
    X^i(x, q), the infinitesimal generator of a bundle automorphism.
    """

    __slots__ = ("bundle", "base_comps", "fiber_comps")

    def __init__(self, bundle: Bundle, base_comps: dict[int, Poly] | None = None,
                 fiber_comps: dict[int, Poly] | None = None):
        self.bundle = bundle
        self.base_comps = {}
        self.fiber_comps = {}
        for mu, p in (base_comps or {}).items():
            bundle._check_mu(mu)
            if not p.uses_only(_BASE_ONLY):
                raise ProjectabilityError(
                    f"base component dx{mu} may depend on base coordinates only"
                )
            if not p.is_zero():
                self.base_comps[mu] = p
        for i, p in (fiber_comps or {}).items():
            bundle._check_i(i)
            if not p.uses_only(_BASE_FIBER):
                raise ProjectabilityError(
                    f"fibre component dq{i} may depend on base and fibre coordinates only"
                )
            if not p.is_zero():
                self.fiber_comps[i] = p

    @property
    def is_vertical(self) -> bool:
        return not self.base_comps

    def base(self, mu: int) -> Poly:
        return self.base_comps.get(mu, Poly.zero(self.bundle.phase))

    def fiber(self, i: int) -> Poly:
        return self.fiber_comps.get(i, Poly.zero(self.bundle.phase))

    def as_vector_on_e(self) -> MultiVector:
        """The field as a degree-1 multivector on phase space (no momentum or
        energy components)."""
        b = self.bundle
        out = MultiVector.zero(b.phase, 1)
        for mu, p in self.base_comps.items():
            out = out + basis_vector(b.phase, b.x(mu)).scale(p)
        for i, p in self.fiber_comps.items():
            out = out + basis_vector(b.phase, b.q(i)).scale(p)
        return out

    def lie_bracket(self, other: "ProjectableVF") -> "ProjectableVF":
        """[X, Y] on E, again projectable."""
        b = self.bundle
        if other.bundle is not b:
            raise ValueError("mixed bundles")
        new_base = {}
        for mu in range(1, b.n + 1):
            acc = Poly.zero(b.phase)
            for nu in range(1, b.n + 1):
                acc = acc + self.base(nu) * other.base(mu).partial(b.x(nu))
                acc = acc - other.base(nu) * self.base(mu).partial(b.x(nu))
            new_base[mu] = acc
        new_fiber = {}
        for i in range(1, b.N + 1):
            acc = Poly.zero(b.phase)
            for nu in range(1, b.n + 1):
                acc = acc + self.base(nu) * other.fiber(i).partial(b.x(nu))
                acc = acc - other.base(nu) * self.fiber(i).partial(b.x(nu))
            for j in range(1, b.N + 1):
                acc = acc + self.fiber(j) * other.fiber(i).partial(b.q(j))
                acc = acc - other.fiber(j) * self.fiber(i).partial(b.q(j))
            new_fiber[i] = acc
        return ProjectableVF(b, new_base, new_fiber)

    def __repr__(self) -> str:
        return f"ProjectableVF({self.as_vector_on_e()!r})"


def is_projectable_input(bundle: Bundle, base_comps: dict[int, Poly],
                         fiber_comps: dict[int, Poly]) -> ProjectableVF:
    """Validate raw components; raises ProjectabilityError on violation."""
    return ProjectableVF(bundle, base_comps, fiber_comps)


# -- lifts ---------------------------------------------------------------------


def lift_jet(x: ProjectableVF) -> MultiVector:
    """Lift to the jet space, with third-group components

        -(dX^i/dq^j v_j^mu - dX^nu/dx^mu v_nu^i + dX^i/dx^mu) d/dv_i^mu.
    """
    b = x.bundle
    jet = b.jet
    out = MultiVector.zero(jet, 1)
    base_j = {mu: p.transport(jet) for mu, p in x.base_comps.items()}
    fiber_j = {i: p.transport(jet) for i, p in x.fiber_comps.items()}
    for mu, p in base_j.items():
        out = out + basis_vector(jet, b.x(mu)).scale(p)
    for i, p in fiber_j.items():
        out = out + basis_vector(jet, b.q(i)).scale(p)
    zero = Poly.zero(jet)
    for i in range(1, b.N + 1):
        xi = fiber_j.get(i, zero)
        for mu in range(1, b.n + 1):
            acc = Poly.zero(jet)
            for j in range(1, b.N + 1):
                acc = acc + xi.partial(b.q(j)) * Poly.var(jet, b.v(j, mu))
            for nu in range(1, b.n + 1):
                acc = acc - base_j.get(nu, zero).partial(b.x(mu)) * Poly.var(jet, b.v(i, nu))
            acc = acc + xi.partial(b.x(mu))
            out = out - basis_vector(jet, b.v(i, mu)).scale(acc)
    return out


def lift_cojet(x: ProjectableVF) -> MultiVector:
    """Lift to phase space; the unique vector field projecting onto X that
    preserves the canonical form (L_X theta = 0):

        X^mu d/dx^mu + X^i d/dq^i
        - (dX^j/dq^i p_j^mu - dX^mu/dx^nu p_i^nu + dX^nu/dx^nu p_i^mu) d/dp_i^mu
        + (dX^i/dx^mu p_i^mu - dX^nu/dx^nu p) d/dp.
    """
    b = x.bundle
    sysm = b.phase
    out = x.as_vector_on_e()
    div = Poly.zero(sysm)
    for nu in range(1, b.n + 1):
        div = div + x.base(nu).partial(b.x(nu))
    for i in range(1, b.N + 1):
        for mu in range(1, b.n + 1):
            acc = Poly.zero(sysm)
            for j in range(1, b.N + 1):
                acc = acc + x.fiber(j).partial(b.q(i)) * Poly.var(sysm, b.p(j, mu))
            for nu in range(1, b.n + 1):
                acc = acc - x.base(mu).partial(b.x(nu)) * Poly.var(sysm, b.p(i, nu))
            acc = acc + div * Poly.var(sysm, b.p(i, mu))
            out = out - basis_vector(sysm, b.p(i, mu)).scale(acc)
    energy = Poly.zero(sysm)
    for i in range(1, b.N + 1):
        for mu in range(1, b.n + 1):
            energy = energy + x.fiber(i).partial(b.x(mu)) * Poly.var(sysm, b.p(i, mu))
    energy = energy - div * Poly.var(sysm, ENERGY)
    out = out + basis_vector(sysm, ENERGY).scale(energy)
    return out


# -- multimomentum map ---------------------------------------------------------


def momentum_map(x: ProjectableVF) -> Form:
    """The Noether current J(X) = i_{lift X} theta, a Hamiltonian (n-1)-form
    with d J(X) = i_{lift X} omega."""
    return contract(lift_cojet(x), theta(x.bundle))


def momentum_map_closed_form(x: ProjectableVF) -> Form:
    """The same current assembled from its component expression

        (p_i^mu X^i - p X^mu) dnx_mu - 1/2 (p_i^mu X^nu - p_i^nu X^mu) dq^i ^ dnx_{mu nu};

    an independent route used to cross-check momentum_map."""
    b = x.bundle
    sysm = b.phase
    out = Form.zero(sysm, b.n - 1)
    for mu in range(1, b.n + 1):
        coeff = -(Poly.var(sysm, ENERGY) * x.base(mu))
        for i in range(1, b.N + 1):
            coeff = coeff + Poly.var(sysm, b.p(i, mu)) * x.fiber(i)
        out = out + dnx_mu(b, mu).scale(coeff)
    half = Fraction(1, 2)
    for i in range(1, b.N + 1):
        dq = one_form(sysm, b.q(i))
        for mu in range(1, b.n + 1):
            for nu in range(1, b.n + 1):
                if mu == nu:
                    continue
                coeff = Poly.var(sysm, b.p(i, mu)) * x.base(nu) \
                    - Poly.var(sysm, b.p(i, nu)) * x.base(mu)
                out = out - dq.wedge(dnx_munu(b, mu, nu)).scale(coeff).scale(half)
    return out


# -- horizontal forms ----------------------------------------------------------


class HorizontalNm1Form:
    """f0 = f0^mu(x, q) dnx_mu, the pull-back of a horizontal (n-1)-form."""

    __slots__ = ("bundle", "comps")

    def __init__(self, bundle: Bundle, comps: dict[int, Poly] | None = None):
        self.bundle = bundle
        self.comps = {}
        for mu, p in (comps or {}).items():
            bundle._check_mu(mu)
            if not p.uses_only(_BASE_FIBER):
                raise ProjectabilityError(
                    f"horizontal component mu{mu} may depend on base and fibre "
                    "coordinates only"
                )
            if not p.is_zero():
                self.comps[mu] = p

    def comp(self, mu: int) -> Poly:
        return self.comps.get(mu, Poly.zero(self.bundle.phase))

    def pullback(self) -> Form:
        b = self.bundle
        out = Form.zero(b.phase, b.n - 1)
        for mu, p in self.comps.items():
            out = out + dnx_mu(b, mu).scale(p)
        return out

    def __repr__(self) -> str:
        return f"HorizontalNm1Form({self.pullback()!r})"
