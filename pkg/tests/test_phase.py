"""Phase space: bundles, canonical forms, lifts, the multimomentum map."""

import random

import pytest

from msymp import (
    Form,
    MultiVector,
    ProjectabilityError,
    ProjectableVF,
    basis_vector,
    contract,
    dnx_mu,
    is_projectable_input,
    lie_derivative,
    lift_cojet,
    lift_jet,
    make_bundle,
    momentum_map,
    momentum_map_closed_form,
    omega,
    one_form,
    schouten,
    theta,
    volume_form,
)
from msymp.poly import ENERGY, Poly

from conftest import rand_vf

BUNDLES = [(1, 1), (2, 1), (2, 2), (3, 2)]


# -- bundles -------------------------------------------------------------------------


def test_dimension_formula():
    for n in range(1, 5):
        for N in range(1, 4):
            b = make_bundle(n, N)
            assert b.dim == (N + 1) * (n + 1)
            assert len(b.phase.coords) == n + N + n * N + 1


def test_mechanics_coordinates(b11):
    names = [c.name for c in b11.phase.coords]
    assert names == ["x1", "q1", "p[1,1]", "en"]
    assert b11.dim == 4


def test_22_inventory_size(b22):
    assert len(b22.phase.coords) == 2 + 2 + 4 + 1


def test_41_dimension():
    assert make_bundle(4, 1).dim == 10


def test_bad_dimensions_rejected():
    with pytest.raises(ValueError):
        make_bundle(0, 1)
    with pytest.raises(ValueError):
        make_bundle(2, 0)


# -- canonical forms -----------------------------------------------------------------


def test_theta_mechanics(b11):
    sysm = b11.phase
    expected = one_form(sysm, b11.q(1)).scale(Poly.var(sysm, b11.p(1, 1))) \
        - one_form(sysm, b11.x(1)).scale(Poly.var(sysm, ENERGY))
    assert theta(b11) == expected


def test_omega_mechanics(b11):
    sysm = b11.phase
    expected = one_form(sysm, b11.q(1)).wedge(one_form(sysm, b11.p(1, 1))) \
        + one_form(sysm, ENERGY).wedge(one_form(sysm, b11.x(1)))
    assert omega(b11) == expected


def test_theta_contract_energy_direction():
    """theta has no dp covector factor, so the interior product with the
    energy direction vanishes; the energy dependence sits in the coefficient
    (d theta picks it up instead)."""
    for (n, N) in BUNDLES:
        b = make_bundle(n, N)
        assert contract(basis_vector(b.phase, ENERGY), theta(b)).is_zero()
        dtheta_part = contract(basis_vector(b.phase, ENERGY), theta(b).d())
        assert dtheta_part == -volume_form(b)


@pytest.mark.parametrize("n,N", BUNDLES)
def test_omega_is_minus_d_theta_and_explicit_sum(n, N):
    b = make_bundle(n, N)
    om = omega(b)
    assert om == -theta(b).d()
    explicit = one_form(b.phase, ENERGY).wedge(volume_form(b))
    for i in range(1, N + 1):
        for mu in range(1, n + 1):
            explicit = explicit + one_form(b.phase, b.q(i)).wedge(
                one_form(b.phase, b.p(i, mu))).wedge(dnx_mu(b, mu))
    assert om == explicit
    assert om.d().is_zero()


# -- projectability ------------------------------------------------------------------


def test_projectable_accepted(b21):
    x2 = Poly.var(b21.phase, b21.x(2))
    q1 = Poly.var(b21.phase, b21.q(1))
    vf = is_projectable_input(b21, {1: x2}, {1: q1})
    assert not vf.is_vertical


def test_base_depending_on_fiber_rejected(b21):
    q1 = Poly.var(b21.phase, b21.q(1))
    with pytest.raises(ProjectabilityError):
        is_projectable_input(b21, {1: q1}, {})


def test_vertical_flagged(b21):
    x1 = Poly.var(b21.phase, b21.x(1))
    q1 = Poly.var(b21.phase, b21.q(1))
    vf = is_projectable_input(b21, {}, {1: x1 * q1})
    assert vf.is_vertical


def test_momentum_dependence_rejected(b21):
    en = Poly.var(b21.phase, ENERGY)
    with pytest.raises(ProjectabilityError):
        is_projectable_input(b21, {}, {1: en})
    p11 = Poly.var(b21.phase, b21.p(1, 1))
    with pytest.raises(ProjectabilityError):
        is_projectable_input(b21, {1: p11}, {})


# -- jet lift (components exactly per the printed display) ----------------------------


def test_lift_jet_constant_fields(b21):
    one = Poly.const(b21.phase, 1)
    assert lift_jet(ProjectableVF(b21, {}, {1: one})) == \
        basis_vector(b21.jet, b21.q(1))
    assert lift_jet(ProjectableVF(b21, {1: one}, {})) == \
        basis_vector(b21.jet, b21.x(1))


def test_lift_jet_linear_vertical(b21):
    q1 = Poly.var(b21.phase, b21.q(1))
    got = lift_jet(ProjectableVF(b21, {}, {1: q1}))
    jet = b21.jet
    expected = basis_vector(jet, b21.q(1)).scale(Poly.var(jet, b21.q(1)))
    for mu in (1, 2):
        expected = expected - basis_vector(jet, b21.v(1, mu)).scale(
            Poly.var(jet, b21.v(1, mu)))
    assert got == expected


def test_lift_jet_formula_substitution(b21):
    """Spot check the full display on a base-moving field."""
    jet = b21.jet
    x2 = Poly.var(b21.phase, b21.x(2))
    vf = ProjectableVF(b21, {1: x2}, {})  # X = x2 d/dx1
    got = lift_jet(vf)
    # third group: -(0 - dX^1/dx^2 v^1_1) d/dv_1^2 = + v[1,1] d/dv[1,2]
    expected = basis_vector(jet, b21.x(1)).scale(Poly.var(jet, b21.x(2))) \
        + basis_vector(jet, b21.v(1, 2)).scale(Poly.var(jet, b21.v(1, 1)))
    assert got == expected


# -- cojet lift ------------------------------------------------------------------------


def test_lift_cojet_constant_vertical(b21):
    one = Poly.const(b21.phase, 1)
    assert lift_cojet(ProjectableVF(b21, {}, {1: one})) == \
        basis_vector(b21.phase, b21.q(1))


def test_lift_cojet_base_translation(b21):
    one = Poly.const(b21.phase, 1)
    assert lift_cojet(ProjectableVF(b21, {1: one}, {})) == \
        basis_vector(b21.phase, b21.x(1))


def test_lift_cojet_scaling_field(b21):
    q1 = Poly.var(b21.phase, b21.q(1))
    got = lift_cojet(ProjectableVF(b21, {}, {1: q1}))
    sysm = b21.phase
    expected = basis_vector(sysm, b21.q(1)).scale(q1)
    for mu in (1, 2):
        expected = expected - basis_vector(sysm, b21.p(1, mu)).scale(
            Poly.var(sysm, b21.p(1, mu)))
    assert got == expected


@pytest.mark.parametrize("n,N", BUNDLES)
def test_lift_preserves_theta_and_omega(n, N):
    b = make_bundle(n, N)
    rng = random.Random(100 * n + N)
    th, om = theta(b), omega(b)
    for t in range(8):
        x = rand_vf(rng, b, vertical=(t % 3 == 0))
        lifted = lift_cojet(x)
        assert lie_derivative(lifted, th).is_zero()
        assert lie_derivative(lifted, om).is_zero()


def test_lift_cojet_is_e_projectable(b21):
    rng = random.Random(31)
    from msymp.poly import CoordKind

    for _ in range(6):
        x = rand_vf(rng, b21)
        lifted = lift_cojet(x)
        for (axis,), coeff in lifted.terms.items():
            kind = b21.phase.coords[axis].kind
            if kind in (CoordKind.BASE, CoordKind.FIBER):
                assert coeff.uses_only({CoordKind.BASE, CoordKind.FIBER})


def test_lift_respects_brackets(b21, b22):
    for b in (b21, b22):
        rng = random.Random(b.n * 10 + b.N)
        for _ in range(8):
            x = rand_vf(rng, b)
            y = rand_vf(rng, b)
            assert lift_cojet(x.lie_bracket(y)) == \
                schouten(lift_cojet(x), lift_cojet(y))


def test_lift_linear_in_field(b21):
    rng = random.Random(32)
    x = rand_vf(rng, b21)
    y = rand_vf(rng, b21)
    summed = ProjectableVF(
        b21,
        {mu: x.base(mu) + y.base(mu) for mu in (1, 2)},
        {1: x.fiber(1) + y.fiber(1)},
    )
    assert lift_cojet(summed) == lift_cojet(x) + lift_cojet(y)


# -- multimomentum map ------------------------------------------------------------------


def test_momentum_vertical_translation(b21):
    """J(d/dq1) = p_1^mu dnx_mu."""
    one = Poly.const(b21.phase, 1)
    j = momentum_map(ProjectableVF(b21, {}, {1: one}))
    expected = Form.zero(b21.phase, 1)
    for mu in (1, 2):
        expected = expected + dnx_mu(b21, mu).scale(
            Poly.var(b21.phase, b21.p(1, mu)))
    assert j == expected


def test_momentum_base_translation(b21):
    """J(d/dx1) by contraction: -p dnx_1 - p_1^mu dq ^ dnx_{mu 1}; the
    energy-term sign is fixed by theta = ... - p dnx."""
    one = Poly.const(b21.phase, 1)
    j = momentum_map(ProjectableVF(b21, {1: one}, {}))
    assert j == momentum_map_closed_form(ProjectableVF(b21, {1: one}, {}))
    vol_part = j.coeff((b21.phase.axis(b21.x(2)),))  # dnx_1 = dx2
    assert vol_part == -Poly.var(b21.phase, ENERGY)


@pytest.mark.parametrize("n,N", BUNDLES)
def test_momentum_contraction_equals_closed_form(n, N):
    b = make_bundle(n, N)
    rng = random.Random(7 * n + N)
    for t in range(10):
        x = rand_vf(rng, b, vertical=(t % 4 == 0))
        assert momentum_map(x) == momentum_map_closed_form(x)


@pytest.mark.parametrize("n,N", BUNDLES)
def test_momentum_is_hamiltonian_form(n, N):
    b = make_bundle(n, N)
    rng = random.Random(9 * n + N)
    om = omega(b)
    for _ in range(6):
        x = rand_vf(rng, b)
        assert momentum_map(x).d() == contract(lift_cojet(x), om)


def test_vertical_momentum_has_first_term_only(b21):
    """Vertical generators produce currents with no dq ^ dnx_{mu nu} part and
    no energy dependence (the internal-symmetry reduction)."""
    rng = random.Random(33)
    from msymp.poly import CoordKind

    for _ in range(6):
        x = rand_vf(rng, b21, vertical=True)
        j = momentum_map(x)
        q_axis = b21.phase.axis(b21.q(1))
        for key, coeff in j.terms.items():
            assert q_axis not in key  # only dnx_mu blades
            assert coeff.uses_only(
                {CoordKind.BASE, CoordKind.FIBER, CoordKind.MOMENTUM})
