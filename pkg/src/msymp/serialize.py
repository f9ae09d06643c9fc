"""Canonical deterministic text rendering of polynomials, forms and
multivectors.

Rules (frozen; golden tests depend on them byte for byte):

* polynomial terms are sorted in descending degree-lexicographic order over
  the canonical coordinate order; multiplication is explicit ("3*x1*q1^2"),
  coefficient 1 is omitted, -1 renders as a leading minus, joined with
  " + " / " - ";
* form/multivector terms are sorted ascending by basis tuple; each term is
  "(coeff) b1^b2^...^bk" with covectors dx<k>/dq<k>/dp[i,mu]/dp (dv[i,mu] on
  jet space) and vectors e_<coordinate name>;
* the zero polynomial/form/multivector renders as "0".

The polynomial rendering re-parses to the same canonical value in the script
language (round-trip identity up to canonical form).
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Coordinate, CoordKind, Poly, monomial_key


def covector_name(c: Coordinate) -> str:
    if c.kind is CoordKind.ENERGY:
        return "dp"
    return "d" + c.name


def vector_name(c: Coordinate) -> str:
    return "e_" + c.name


def _monomial_str(system, m) -> str:
    parts = []
    for axis, e in m:
        name = system.coords[axis].name
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def poly_str(p: Poly) -> str:
    if p.is_zero():
        return "0"
    chunks: list[str] = []
    for m, c in p.sorted_terms():
        mono = _monomial_str(p.system, m)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not chunks:
            chunks.append(body if c > 0 else "-" + body)
        else:
            chunks.append(("+ " if c > 0 else "- ") + body)
    return " ".join(chunks)


def graded_str(obj) -> str:
    """Render a Form or MultiVector canonically."""
    from .exterior import MultiVector

    if obj.is_zero():
        return "0"
    naming = vector_name if isinstance(obj, MultiVector) else covector_name
    coords = obj.system.coords
    parts = []
    for key in sorted(obj.terms):
        blade = "^".join(naming(coords[a]) for a in key)
        coeff = poly_str(obj.terms[key])
        parts.append(f"({coeff}) {blade}".rstrip())
    return " + ".join(parts)


def fraction_str(v: Fraction) -> str:
    return str(v)
