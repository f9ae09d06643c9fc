"""Exact sparse multivariate polynomial arithmetic over the rationals.

Coefficient functions live in a fixed coordinate system (the phase-space or
jet-space inventory of a bundle).  A polynomial maps monomials to Fraction
coefficients; a monomial is a tuple of (axis, exponent) pairs sorted by axis
with all exponents positive.  Zero-coefficient terms are never stored, so two
polynomials are equal iff their term maps are equal (canonical form).

All values are immutable after construction and all operations are pure, so
they are safe to share between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

Scalar = Union[int, Fraction]
Monomial = tuple[tuple[int, int], ...]


class BundleMismatchError(ValueError):
    """Operands live over different coordinate systems."""


class IncompletePointError(ValueError):
    """A Point does not assign every coordinate of its system."""


class CoordKind(enum.Enum):
    BASE = "x"        # x^mu on the base manifold
    FIBER = "q"       # q^i on the standard fibre
    MOMENTUM = "p"    # p_i^mu multimomenta
    ENERGY = "en"     # the single energy coordinate p
    JET = "v"         # q^i_mu first-derivative coordinates (jet space only)


@dataclass(frozen=True)
class Coordinate:
    """One coordinate label.  i is the fibre index, mu the base index;
    unused indices are 0 (BASE uses mu only, FIBER uses i only, ENERGY none).
    """

    kind: CoordKind
    i: int = 0
    mu: int = 0

    @property
    def name(self) -> str:
        k = self.kind
        if k is CoordKind.BASE:
            return f"x{self.mu}"
        if k is CoordKind.FIBER:
            return f"q{self.i}"
        if k is CoordKind.MOMENTUM:
            return f"p[{self.i},{self.mu}]"
        if k is CoordKind.ENERGY:
            return "en"
        return f"v[{self.i},{self.mu}]"


def base(mu: int) -> Coordinate:
    return Coordinate(CoordKind.BASE, mu=mu)


def fiber(i: int) -> Coordinate:
    return Coordinate(CoordKind.FIBER, i=i)


def momentum(i: int, mu: int) -> Coordinate:
    return Coordinate(CoordKind.MOMENTUM, i=i, mu=mu)


ENERGY = Coordinate(CoordKind.ENERGY)


def jet_velocity(i: int, mu: int) -> Coordinate:
    return Coordinate(CoordKind.JET, i=i, mu=mu)


class CoordSystem:
    """An ordered coordinate inventory.  The ordering fixes axis numbers,
    the canonical monomial order and the basis order of exterior objects.
    """

    __slots__ = ("label", "coords", "_index")

    def __init__(self, label: str, coords: Iterable[Coordinate]):
        self.label = label
        self.coords = tuple(coords)
        self._index = {c: a for a, c in enumerate(self.coords)}
        if len(self._index) != len(self.coords):
            raise ValueError("duplicate coordinates in system")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def axis(self, c: Coordinate) -> int:
        try:
            return self._index[c]
        except KeyError:
            raise BundleMismatchError(
                f"coordinate {c.name} does not belong to {self.label}"
            ) from None

    def __contains__(self, c: Coordinate) -> bool:
        return c in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, CoordSystem) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"CoordSystem({self.label!r}, dim={self.dim})"


def _check_same_system(a: CoordSystem, b: CoordSystem) -> None:
    if a != b:
        raise BundleMismatchError(f"mixed coordinate systems: {a.label} vs {b.label}")


def monomial_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def monomial_key(m: Monomial, dim: int) -> tuple:
    """Degree-lexicographic sort key: total degree first, then the dense
    exponent vector in canonical coordinate order."""
    dense = [0] * dim
    for a, e in m:
        dense[a] = e
    return (monomial_degree(m), tuple(dense))


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out: dict[int, int] = dict(m1)
    for a, e in m2:
        out[a] = out.get(a, 0) + e
    return tuple(sorted(out.items()))


class Poly:
    """A sparse polynomial with exact rational coefficients."""

    __slots__ = ("system", "terms")

    def __init__(self, system: CoordSystem, terms: Mapping[Monomial, Fraction] | None = None):
        self.system = system
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[m] = c
        self.terms = clean

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, system: CoordSystem) -> "Poly":
        return cls(system)

    @classmethod
    def const(cls, system: CoordSystem, value: Scalar) -> "Poly":
        v = Fraction(value)
        return cls(system, {(): v} if v else {})

    @classmethod
    def var(cls, system: CoordSystem, c: Coordinate) -> "Poly":
        return cls(system, {((system.axis(c), 1),): Fraction(1)})

    # queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms[()]

    def degree(self) -> int:
        return max((monomial_degree(m) for m in self.terms), default=0)

    def axes_used(self) -> set[int]:
        used: set[int] = set()
        for m in self.terms:
            used.update(a for a, _ in m)
        return used

    def uses_only(self, kinds: set[CoordKind]) -> bool:
        coords = self.system.coords
        return all(coords[a].kind in kinds for a in self.axes_used())

    def num_terms(self) -> int:
        return len(self.terms)

    # ring operations ----------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        _check_same_system(self.system, other.system)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(self.system, out)

    def __sub__(self, other: "Poly") -> "Poly":
        _check_same_system(self.system, other.system)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) - c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(self.system, out)

    def __neg__(self) -> "Poly":
        return Poly._raw(self.system, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other: "Poly | Scalar") -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        _check_same_system(self.system, other.system)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, Fraction(0)) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(self.system, out)

    def __rmul__(self, other: Scalar) -> "Poly":
        return self.scale(other)

    def scale(self, k: Scalar) -> "Poly":
        k = Fraction(k)
        if not k:
            return Poly.zero(self.system)
        return Poly._raw(self.system, {m: k * c for m, c in self.terms.items()})

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative exponent")
        out = Poly.const(self.system, 1)
        for _ in range(e):
            out = out * self
        return out

    @classmethod
    def _raw(cls, system: CoordSystem, terms: dict[Monomial, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.system = system
        p.terms = terms
        return p

    # calculus -----------------------------------------------------------

    def partial(self, c: Coordinate) -> "Poly":
        """Formal partial derivative with respect to one coordinate."""
        return self.partial_axis(self.system.axis(c))

    def partial_axis(self, axis: int) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for j, (a, e) in enumerate(m):
                if a == axis:
                    if e == 1:
                        dm = m[:j] + m[j + 1:]
                    else:
                        dm = m[:j] + ((a, e - 1),) + m[j + 1:]
                    s = out.get(dm, Fraction(0)) + c * e
                    if s:
                        out[dm] = s
                    else:
                        out.pop(dm, None)
                    break
        return Poly._raw(self.system, out)

    def evaluate(self, pt: "Point") -> Fraction:
        _check_same_system(self.system, pt.system)
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for a, e in m:
                v *= pt.values[a] ** e
            total += v
        return total

    def transport(self, target: CoordSystem) -> "Poly":
        """Re-express this polynomial over another system that contains every
        coordinate it actually uses (e.g. phase-space x,q polys onto jet space)."""
        out: dict[Monomial, Fraction] = {}
        src = self.system.coords
        for m, c in self.terms.items():
            nm = tuple(sorted((target.axis(src[a]), e) for a, e in m))
            out[nm] = c
        return Poly._raw(target, out)

    # comparison / display -------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and self.system == other.system
            and self.terms == other.terms
        )

    __hash__ = None  # type: ignore[assignment]

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in descending canonical (deg-lex) order, for display."""
        dim = self.system.dim
        return sorted(self.terms.items(), key=lambda t: monomial_key(t[0], dim), reverse=True)

    def __repr__(self) -> str:
        from .serialize import poly_str

        return f"Poly({poly_str(self)})"


class Point:
    """A total assignment of rational values to every coordinate of a system."""

    __slots__ = ("system", "values")

    def __init__(self, system: CoordSystem, assignment: Mapping[Coordinate, Scalar],
                 default: Scalar | None = None):
        self.system = system
        vals: list[Fraction] = []
        missing: list[str] = []
        for c in system.coords:
            if c in assignment:
                vals.append(Fraction(assignment[c]))
            elif default is not None:
                vals.append(Fraction(default))
            else:
                missing.append(c.name)
        if missing:
            raise IncompletePointError(
                f"point does not assign: {', '.join(missing)}"
            )
        for c in assignment:
            system.axis(c)  # reject foreign coordinates
        self.values = tuple(vals)

    @classmethod
    def zero(cls, system: CoordSystem) -> "Point":
        return cls(system, {}, default=0)

    def __getitem__(self, c: Coordinate) -> Fraction:
        return self.values[self.system.axis(c)]

    def __repr__(self) -> str:
        parts = ", ".join(f"{c.name}={v}" for c, v in zip(self.system.coords, self.values))
        return f"Point({parts})"
