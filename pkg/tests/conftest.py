"""Shared randomized-input generators for the test suite (all seeded)."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest

from msymp import (
    Form,
    HorizontalNm1Form,
    MultiVector,
    ProjectableVF,
    build_hamiltonian_form,
    make_bundle,
)
from msymp.poly import Point, Poly


def rand_poly(rng, sysm, axes=None, max_deg=2, maxterms=3, coeff=3):
    """Random sparse polynomial of total degree <= max_deg."""
    if axes is None:
        axes = list(range(sysm.dim))
    p = Poly.zero(sysm)
    for _ in range(rng.randint(1, maxterms)):
        m = {}
        for _ in range(rng.randint(0, max_deg)):
            a = rng.choice(axes)
            m[a] = m.get(a, 0) + 1
        p = p + Poly(sysm, {tuple(sorted(m.items())): Fraction(rng.randint(-coeff, coeff))})
    return p


def x_axes(b):
    return [b.phase.axis(b.x(mu)) for mu in range(1, b.n + 1)]


def q_axes(b):
    return [b.phase.axis(b.q(i)) for i in range(1, b.N + 1)]


def rand_vf(rng, b, vertical=False) -> ProjectableVF:
    base = {} if vertical else {
        mu: rand_poly(rng, b.phase, x_axes(b)) for mu in range(1, b.n + 1)}
    fib = {i: rand_poly(rng, b.phase, x_axes(b) + q_axes(b))
           for i in range(1, b.N + 1)}
    return ProjectableVF(b, base, fib)


def rand_horizontal(rng, b) -> HorizontalNm1Form:
    return HorizontalNm1Form(b, {
        mu: rand_poly(rng, b.phase, x_axes(b) + q_axes(b))
        for mu in range(1, b.n + 1)})


def rand_hform(rng, b, with_f0=True, vertical=None, closed_part=None):
    if vertical is None:
        vertical = rng.random() < 0.25
    f0 = rand_horizontal(rng, b) if with_f0 else None
    return build_hamiltonian_form(rand_vf(rng, b, vertical=vertical), f0,
                                  closed_part)


def rand_form(rng, b, degree, nterms=2) -> Form:
    keys = list(combinations(range(b.dim), degree))
    terms = {}
    for _ in range(nterms):
        terms[rng.choice(keys)] = rand_poly(rng, b.phase)
    return Form(b.phase, degree, terms)


def rand_mv(rng, b, degree, nterms=2) -> MultiVector:
    keys = list(combinations(range(b.dim), degree))
    terms = {}
    for _ in range(nterms):
        terms[rng.choice(keys)] = rand_poly(rng, b.phase)
    return MultiVector(b.phase, degree, terms)


def rand_point(rng, b) -> Point:
    return Point(b.phase, {
        c: Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        for c in b.phase.coords})


def rand_closed(rng, b) -> Form:
    """A random closed (n-1)-form: exact for n >= 2, constant for n = 1."""
    if b.n == 1:
        return Form(b.phase, 0, {(): Poly.const(b.phase, rng.randint(-3, 3))})
    return rand_form(rng, b, b.n - 2).d()


@pytest.fixture(scope="session")
def b11():
    return make_bundle(1, 1)


@pytest.fixture(scope="session")
def b21():
    return make_bundle(2, 1)


@pytest.fixture(scope="session")
def b22():
    return make_bundle(2, 2)


@pytest.fixture(scope="session")
def b32():
    return make_bundle(3, 2)
