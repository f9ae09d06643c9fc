"""Exterior algebra: wedge, d, contraction, Lie derivative along
multivectors, Schouten bracket, pointwise kernels."""

import random
from fractions import Fraction

import pytest

from msymp import (
    Form,
    MultiVector,
    basis_vector,
    contract,
    is_closed,
    kernel_at_point,
    lie_derivative,
    make_bundle,
    omega,
    one_form,
    schouten,
    theta,
    volume_form,
)
from msymp.poly import BundleMismatchError, Poly

from conftest import rand_form, rand_mv, rand_point, rand_poly
from oracle_dense import (
    DenseAlt,
    dense_contract,
    dense_d,
    dense_lie_vector,
    dense_wedge,
)


@pytest.fixture(scope="module")
def b():
    return make_bundle(2, 1)


def lie_rhs_contraction(x, y, a):
    """Right side of the Schouten/contraction relation
    i_{[X,Y]} = (-1)^{(p-1)q} (L_X i_Y - (-1)^{(p-1)q} i_Y L_X)."""
    s = -1 if ((x.degree - 1) * y.degree) % 2 else 1
    return lie_derivative(x, contract(y, a)).scale(s) \
        - contract(y, lie_derivative(x, a))


def lie_rhs_composition(x, y, a):
    """Right side of the derivative relation
    L_{[X,Y]} = (-1)^{(p-1)(q-1)} (L_X L_Y - (-1)^{(p-1)(q-1)} L_Y L_X)."""
    s = -1 if ((x.degree - 1) * (y.degree - 1)) % 2 else 1
    return lie_derivative(x, lie_derivative(y, a)).scale(s) \
        - lie_derivative(y, lie_derivative(x, a))


# -- wedge -----------------------------------------------------------------------


def test_wedge_repeated_factor_vanishes(b):
    dq = one_form(b.phase, b.q(1))
    assert dq.wedge(dq).is_zero()


def test_wedge_antisymmetry_of_one_forms(b):
    d1 = one_form(b.phase, b.x(1))
    d2 = one_form(b.phase, b.x(2))
    assert d1.wedge(d2) == -(d2.wedge(d1))


def test_wedge_bilinearity_over_poly(b):
    q = Poly.var(b.phase, b.q(1))
    en = Poly.var(b.phase, b.en)
    lhs = one_form(b.phase, b.x(1)).scale(q).wedge(
        one_form(b.phase, b.q(1)).scale(en))
    rhs = one_form(b.phase, b.x(1)).wedge(one_form(b.phase, b.q(1))).scale(q * en)
    assert lhs == rhs


def test_wedge_graded_commutativity(b):
    rng = random.Random(10)
    for _ in range(30):
        k = rng.randint(0, 3)
        l = rng.randint(0, 3)
        a = rand_form(rng, b, k)
        c = rand_form(rng, b, l)
        sign = -1 if (k * l) % 2 else 1
        assert a.wedge(c) == c.wedge(a).scale(sign)


def test_wedge_associativity(b):
    rng = random.Random(11)
    for _ in range(25):
        a = rand_form(rng, b, rng.randint(0, 2))
        c = rand_form(rng, b, rng.randint(0, 2))
        e = rand_form(rng, b, rng.randint(0, 2))
        assert a.wedge(c.wedge(e)) == (a.wedge(c)).wedge(e)


def test_wedge_kind_mismatch(b):
    with pytest.raises(BundleMismatchError):
        rand_form(random.Random(0), b, 1).wedge(rand_mv(random.Random(0), b, 1))


# -- exterior derivative -----------------------------------------------------------


def test_d_of_coefficient(b):
    q = Poly.var(b.phase, b.q(1))
    lhs = one_form(b.phase, b.x(1)).scale(q).d()
    assert lhs == one_form(b.phase, b.q(1)).wedge(one_form(b.phase, b.x(1)))


def test_d_nilpotent(b):
    rng = random.Random(12)
    for _ in range(30):
        a = rand_form(rng, b, rng.randint(0, 3))
        assert a.d().d().is_zero()
        assert is_closed(a.d())


def test_d_leibniz(b):
    rng = random.Random(13)
    for _ in range(25):
        k = rng.randint(0, 2)
        a = rand_form(rng, b, k)
        c = rand_form(rng, b, rng.randint(0, 2))
        sign = -1 if k % 2 else 1
        assert a.wedge(c).d() == a.d().wedge(c) + a.wedge(c.d()).scale(sign)


def test_d_theta_is_minus_omega(b):
    assert theta(b).d() == -omega(b)


def test_is_closed(b):
    assert not is_closed(theta(b))
    q = Poly.var(b.phase, b.q(1))
    assert not is_closed(one_form(b.phase, b.x(1)).scale(q))
    assert is_closed(omega(b))


# -- contraction --------------------------------------------------------------------


def test_contract_volume(b):
    vol = volume_form(b)
    got = contract(basis_vector(b.phase, b.x(1)), vol)
    assert got == one_form(b.phase, b.x(2))  # i_{e_1} (dx1^dx2) = dx2


def test_contract_dual_pairing(b):
    got = contract(basis_vector(b.phase, b.q(1)), one_form(b.phase, b.q(1)))
    assert got == Form(b.phase, 0, {(): Poly.const(b.phase, 1)})


def test_contract_ordering_convention_frozen(b):
    """i_{e_1 ^ e_2} (dx1 ^ dx2) = +1: first wedge factor contracts first."""
    two_vec = basis_vector(b.phase, b.x(1)).wedge(basis_vector(b.phase, b.x(2)))
    vol = volume_form(b)
    got = contract(two_vec, vol)
    assert got == Form(b.phase, 0, {(): Poly.const(b.phase, 1)})


def test_contract_vector_squares_to_zero(b):
    rng = random.Random(14)
    for _ in range(25):
        x = rand_mv(rng, b, 1)
        a = rand_form(rng, b, rng.randint(2, 4))
        assert contract(x, contract(x, a)).is_zero()


def test_contract_degree_overflow_is_zero(b):
    rng = random.Random(15)
    x = rand_mv(rng, b, 3)
    a = rand_form(rng, b, 2)
    assert contract(x, a).is_zero()


def test_degree_zero_multivector_multiplies(b):
    rng = random.Random(16)
    f = rand_poly(rng, b.phase)
    scalar = MultiVector(b.phase, 0, {(): f})
    a = rand_form(rng, b, 2)
    assert contract(scalar, a) == a.scale(f)


# -- Lie derivative ------------------------------------------------------------------


def test_lie_classical_vector_case(b):
    x1 = Poly.var(b.phase, b.x(1))
    a = one_form(b.phase, b.q(1)).scale(x1)
    got = lie_derivative(basis_vector(b.phase, b.x(1)), a)
    assert got == one_form(b.phase, b.q(1))


def test_lie_matches_classical_tensor_formula(b):
    rng = random.Random(17)
    for _ in range(25):
        x = rand_mv(rng, b, 1)
        a = rand_form(rng, b, rng.randint(0, 3))
        got = lie_derivative(x, a)
        oracle = dense_lie_vector(DenseAlt.from_sparse(x), DenseAlt.from_sparse(a))
        assert got.terms == oracle.to_terms()


def test_d_commutes_with_lie(b):
    rng = random.Random(18)
    for _ in range(20):
        p = rng.randint(1, 3)
        x = rand_mv(rng, b, p)
        a = rand_form(rng, b, rng.randint(p, 4))
        lhs = lie_derivative(x, a).d()
        rhs = lie_derivative(x, a.d()).scale(-1 if (p - 1) % 2 else 1)
        assert (lhs - rhs).is_zero()


# -- Schouten bracket -----------------------------------------------------------------


def test_schouten_reduces_to_lie_bracket(b):
    q = Poly.var(b.phase, b.q(1))
    x = basis_vector(b.phase, b.q(1))
    y = basis_vector(b.phase, b.q(1)).scale(q)
    assert schouten(x, y) == basis_vector(b.phase, b.q(1))


def test_schouten_contraction_relation(b):
    rng = random.Random(19)
    for _ in range(20):
        x = rand_mv(rng, b, 1)
        y = rand_mv(rng, b, 2)
        a = rand_form(rng, b, 3)
        assert (contract(schouten(x, y), a) - lie_rhs_contraction(x, y, a)).is_zero()


def test_schouten_contraction_relation_all_small_degrees(b):
    rng = random.Random(20)
    for p in (1, 2):
        for q in (1, 2):
            for _ in range(10):
                x = rand_mv(rng, b, p)
                y = rand_mv(rng, b, q)
                a = rand_form(rng, b, min(p + q, b.dim))
                assert (contract(schouten(x, y), a)
                        - lie_rhs_contraction(x, y, a)).is_zero()
                assert (lie_derivative(schouten(x, y), a)
                        - lie_rhs_composition(x, y, a)).is_zero()


def test_schouten_graded_antisymmetry(b):
    rng = random.Random(21)
    for _ in range(20):
        p = rng.randint(1, 3)
        q = rng.randint(1, 3)
        x = rand_mv(rng, b, p)
        y = rand_mv(rng, b, q)
        sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
        assert schouten(x, y) == schouten(y, x).scale(sign)


def test_hamiltonian_multivector_field_is_multisymplectic(b):
    """If i_X omega is exact then L_X omega = 0: vector instances from the
    Hamiltonian class, multivector instances from constant coefficients."""
    rng = random.Random(22)
    om = omega(b)
    from conftest import rand_hform

    for _ in range(10):
        f = rand_hform(rng, b)
        x = f.vector_field()
        assert contract(x, om) == f.form.d()  # i_X omega exact by construction
        assert lie_derivative(x, om).is_zero()
    for _ in range(10):
        z = rand_mv(rng, b, 2)
        z = z.map_coefficients(
            lambda p: Poly.const(b.phase, p.terms.get((), Fraction(0))))
        # i_Z omega has constant coefficients, hence is exact
        izw = contract(z, om)
        assert is_closed(izw)
        assert lie_derivative(z, om).is_zero()


def test_schouten_of_multisymplectic_is_hamiltonian(b):
    """For multisymplectic X, Y the bracket satisfies i_{[X,Y]} omega =
    +- d(i_X i_Y omega), hence is exact."""
    rng = random.Random(23)
    om = omega(b)
    from msymp import lift_cojet
    from conftest import rand_vf

    for _ in range(10):
        x = lift_cojet(rand_vf(rng, b))
        y = lift_cojet(rand_vf(rng, b))
        lhs = contract(schouten(x, y), om)
        rhs = contract(x, contract(y, om)).d()
        assert (lhs - rhs).is_zero() or (lhs + rhs).is_zero()
        assert (lhs - rhs).is_zero()  # the implementation produces + here
    # vector with constant 2-multivector
    for _ in range(6):
        x = lift_cojet(rand_vf(rng, b))
        z = rand_mv(rng, b, 2).map_coefficients(
            lambda p: Poly.const(b.phase, p.terms.get((), Fraction(0))))
        assert lie_derivative(z, om).is_zero()
        bracket_xz = schouten(x, z)
        got = contract(bracket_xz, om)
        cand = contract(x, contract(z, om)).d()
        assert (got - cand).is_zero() or (got + cand).is_zero()
        assert is_closed(got)


# -- kernels -----------------------------------------------------------------------


def test_omega_vector_kernel_trivial(b):
    rng = random.Random(24)
    for _ in range(5):
        pt = rand_point(rng, b)
        assert kernel_at_point(omega(b), 1, pt).dimension == 0


def test_volume_vector_kernel(b):
    rng = random.Random(25)
    pt = rand_point(rng, b)
    kern = kernel_at_point(volume_form(b), 1, pt)
    assert kern.dimension == b.N * b.n + b.N + 1  # all non-base directions
    for z in kern.basis:
        assert contract(z, volume_form(b).evaluate(pt)).is_zero()


def test_omega_two_vector_kernel_dimension(b):
    rng = random.Random(26)
    pt = rand_point(rng, b)
    kern = kernel_at_point(omega(b), 2, pt)
    # independent oracle: brute-force rank of the dense contraction matrix
    from itertools import combinations

    om0 = omega(b).evaluate(pt)
    cols = list(combinations(range(b.dim), 2))
    rows = list(combinations(range(b.dim), 1))
    dense_om = DenseAlt.from_sparse(om0)
    matrix = []
    for rkey in rows:
        row = []
        for ckey in cols:
            zz = DenseAlt(b.phase, 2)
            zz.comp[ckey] = Poly.const(b.phase, 1)
            val = dense_contract(zz, dense_om).comp.get(rkey)
            row.append(val.constant_value() if val is not None else Fraction(0))
        matrix.append(row)
    rank = _rank(matrix)
    assert kern.dimension == len(cols) - rank
    assert kern.dimension == 9  # frozen for (n=2, N=1)
    for z in kern.basis:
        assert contract(z, om0).is_zero()


def _rank(m):
    m = [row[:] for row in m]
    rank = 0
    cols = len(m[0]) if m else 0
    row = 0
    for col in range(cols):
        piv = None
        for r in range(row, len(m)):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for r in range(len(m)):
            if r != row and m[r][col]:
                f = m[r][col] / m[row][col]
                m[r] = [a - f * c for a, c in zip(m[r], m[row])]
        row += 1
        rank += 1
    return rank


# -- dense oracle cross-check (sparse algorithms vs full expansion) -------------------


def test_sparse_matches_dense_oracle():
    rng = random.Random(27)
    cases = 0
    for (n, N) in [(1, 1), (2, 1), (2, 2)]:
        b = make_bundle(n, N)
        while cases < 70 * (1 + (n + N > 3)):
            k = rng.randint(0, min(3, b.dim - 1))
            l = rng.randint(0, min(3, b.dim - k))
            a = rand_form(rng, b, k)
            c = rand_form(rng, b, l)
            da, dc = DenseAlt.from_sparse(a), DenseAlt.from_sparse(c)
            assert a.wedge(c).terms == dense_wedge(da, dc).to_terms()
            assert a.d().terms == dense_d(da).to_terms()
            r = rng.randint(0, k)
            x = rand_mv(rng, b, r)
            assert contract(x, a).terms == dense_contract(
                DenseAlt.from_sparse(x), da).to_terms()
            cases += 3
        cases = 0
