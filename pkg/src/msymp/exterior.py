"""Graded exterior algebra of forms and multivector fields.

Both kinds of object are sparse maps from strictly increasing tuples of basis
axes to polynomial coefficients.  A key (a1 < a2 < ... < ak) stands for
dxi_{a1} ^ ... ^ dxi_{ak} on forms and for e_{a1} ^ ... ^ e_{ak} on
multivectors, where e_a is the coordinate vector field of axis a.

Pinned conventions (see CONVENTIONS.md; asserted by tests):

* contraction of a decomposable multivector contracts the FIRST wedge factor
  first: i_{X1 ^ ... ^ Xr} = i_{Xr} o ... o i_{X1}.  On matching increasing
  basis tuples this gives i_{e_S} (dxi_S) = +1.
* the Lie derivative along an r-multivector X is the graded commutator
  L_X = d i_X - (-1)^r i_X d.
* the Schouten bracket extends the Lie bracket of vector fields; on
  decomposables it is the pairwise-bracket Leibniz expansion
  sum_{k,l} (-1)^{k+l} [u_k, v_l] ^ rest (no extra overall sign), which is
  the unique normalisation satisfying
  i_{[X,Y]} = (-1)^{(p-1)q} (L_X i_Y - (-1)^{(p-1)q} i_Y L_X).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .poly import (
    BundleMismatchError,
    CoordSystem,
    Point,
    Poly,
    _check_same_system,
)

Key = tuple[int, ...]


def merge_wedge(s: Key, t: Key) -> tuple[Key, int] | None:
    """Merge two strictly increasing tuples; return (merged, sign) where sign
    is the parity of the shuffle, or None if they share an axis."""
    if not s:
        return t, 1
    if not t:
        return s, 1
    out: list[int] = []
    sign = 1
    i = j = 0
    while i < len(s) and j < len(t):
        if s[i] == t[j]:
            return None
        if s[i] < t[j]:
            out.append(s[i])
            i += 1
        else:
            # t[j] jumps over the remaining len(s)-i factors of s
            if (len(s) - i) % 2:
                sign = -sign
            out.append(t[j])
            j += 1
    out.extend(s[i:])
    out.extend(t[j:])
    return tuple(out), sign


def insert_axis(key: Key, a: int) -> tuple[Key, int] | None:
    """Insert one axis into an increasing tuple; sign (-1)^position."""
    pos = 0
    for k in key:
        if k == a:
            return None
        if k < a:
            pos += 1
        else:
            break
    sign = -1 if pos % 2 else 1
    return key[:pos] + (a,) + key[pos:], sign


def contract_key(mv_key: Key, form_key: Key) -> tuple[Key, int] | None:
    """Contract basis multivector e_{mv_key} into basis form dxi_{form_key},
    first wedge factor first.  Returns (remaining_key, sign) or None."""
    key = list(form_key)
    sign = 1
    for a in mv_key:
        try:
            pos = key.index(a)
        except ValueError:
            return None
        if pos % 2:
            sign = -sign
        del key[pos]
    return tuple(key), sign


class _Alternating:
    """Shared machinery of Form and MultiVector."""

    __slots__ = ("system", "degree", "terms")

    def __init__(self, system: CoordSystem, degree: int,
                 terms: dict[Key, Poly] | None = None):
        if degree < 0 or degree > system.dim:
            raise ValueError(f"degree {degree} out of range for dim {system.dim}")
        self.system = system
        self.degree = degree
        clean: dict[Key, Poly] = {}
        if terms:
            for k, p in terms.items():
                if len(k) != degree:
                    raise ValueError(f"key {k} has wrong length for degree {degree}")
                if not p.is_zero():
                    clean[k] = p
        self.terms = clean

    @classmethod
    def zero(cls, system: CoordSystem, degree: int = 0):
        return cls(system, min(max(degree, 0), system.dim))

    @classmethod
    def _raw(cls, system: CoordSystem, degree: int, terms: dict[Key, Poly]):
        obj = cls.__new__(cls)
        obj.system = system
        obj.degree = degree
        obj.terms = terms
        return obj

    def is_zero(self) -> bool:
        return not self.terms

    def num_terms(self) -> int:
        return len(self.terms)

    def coeff(self, key: Key) -> Poly:
        return self.terms.get(key, Poly.zero(self.system))

    def _same_shape(self, other) -> None:
        if type(self) is not type(other):
            raise BundleMismatchError(
                f"cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        _check_same_system(self.system, other.system)

    def __add__(self, other):
        self._same_shape(other)
        if self.degree != other.degree:
            # a zero object is a valid element of every degree
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise ValueError("cannot add objects of different degree")
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        out = dict(self.terms)
        for k, p in other.terms.items():
            s = out.get(k)
            s = p if s is None else s + p
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return type(self)._raw(self.system, self.degree, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return type(self)._raw(
            self.system, self.degree, {k: -p for k, p in self.terms.items()}
        )

    def scale(self, p: Poly | int | Fraction):
        if isinstance(p, (int, Fraction)):
            if not p:
                return type(self).zero(self.system, self.degree)
            return type(self)._raw(
                self.system, self.degree, {k: c * p for k, c in self.terms.items()}
            )
        out = {}
        for k, c in self.terms.items():
            s = c * p
            if not s.is_zero():
                out[k] = s
        return type(self)._raw(self.system, self.degree, out)

    def wedge(self, other):
        self._same_shape(other)
        deg = self.degree + other.degree
        if deg > self.system.dim:
            return type(self).zero(self.system, self.system.dim)
        out: dict[Key, Poly] = {}
        for k1, p1 in self.terms.items():
            for k2, p2 in other.terms.items():
                merged = merge_wedge(k1, k2)
                if merged is None:
                    continue
                key, sign = merged
                c = p1 * p2 if sign > 0 else -(p1 * p2)
                s = out.get(key)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return type(self)._raw(self.system, deg, out)

    def __xor__(self, other):
        return self.wedge(other)

    def evaluate(self, pt: Point):
        """Freeze coefficients at a point (result has constant coefficients)."""
        out: dict[Key, Poly] = {}
        for k, p in self.terms.items():
            v = p.evaluate(pt)
            if v:
                out[k] = Poly.const(self.system, v)
        return type(self)._raw(self.system, self.degree, out)

    def map_coefficients(self, fn):
        out: dict[Key, Poly] = {}
        for k, p in self.terms.items():
            v = fn(p)
            if not v.is_zero():
                out[k] = v
        return type(self)._raw(self.system, self.degree, out)

    def __eq__(self, other) -> bool:
        return (
            type(self) is type(other)
            and self.system == other.system
            and self.degree == other.degree
            and self.terms == other.terms
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        from .serialize import graded_str

        return f"{type(self).__name__}({graded_str(self)})"


class Form(_Alternating):
    """A differential form with polynomial coefficients."""

    def d(self) -> "Form":
        """Exterior derivative."""
        if self.degree >= self.system.dim:
            return Form.zero(self.system, self.system.dim)
        out: dict[Key, Poly] = {}
        for key, p in self.terms.items():
            for axis in p.axes_used():
                dp = p.partial_axis(axis)
                if dp.is_zero():
                    continue
                ins = insert_axis(key, axis)
                if ins is None:
                    continue
                nkey, sign = ins
                c = dp if sign > 0 else -dp
                s = out.get(nkey)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(nkey, None)
                else:
                    out[nkey] = s
        return Form._raw(self.system, self.degree + 1, out)


class MultiVector(_Alternating):
    """A multivector field with polynomial coefficients."""


def one_form(system: CoordSystem, coord) -> Form:
    """The basis covector dxi of one coordinate."""
    return Form(system, 1, {(system.axis(coord),): Poly.const(system, 1)})


def basis_vector(system: CoordSystem, coord) -> MultiVector:
    """The coordinate vector field of one coordinate."""
    return MultiVector(system, 1, {(system.axis(coord),): Poly.const(system, 1)})


def constant_form(system: CoordSystem, value=1) -> Form:
    return Form(system, 0, {(): Poly.const(system, value)})


def wedge(a, b):
    return a.wedge(b)


def exterior_derivative(a: Form) -> Form:
    return a.d()


def is_closed(a: Form) -> bool:
    return a.d().is_zero()


def contract(x: MultiVector, a: Form) -> Form:
    """Interior product of a multivector into a form (first factor first).

    Degree-0 multivectors act by multiplication; if deg x > deg a the result
    is zero.  Bilinear over polynomial coefficients of both arguments.
    """
    if not isinstance(x, MultiVector) or not isinstance(a, Form):
        raise BundleMismatchError("contract expects (MultiVector, Form)")
    _check_same_system(x.system, a.system)
    if x.degree > a.degree:
        return Form.zero(a.system, 0)
    out: dict[Key, Poly] = {}
    for sk, sp in x.terms.items():
        for tk, tp in a.terms.items():
            hit = contract_key(sk, tk)
            if hit is None:
                continue
            key, sign = hit
            c = sp * tp if sign > 0 else -(sp * tp)
            s = out.get(key)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return Form._raw(a.system, a.degree - x.degree, out)


def lie_derivative(x: MultiVector, a: Form) -> Form:
    """L_X a = d i_X a - (-1)^r i_X da for an r-multivector X."""
    _check_same_system(x.system, a.system)
    first = contract(x, a).d()
    second = contract(x, a.d())
    if x.degree % 2:
        return first + second
    return first - second


# -- Schouten bracket ---------------------------------------------------------


def _lie_bracket_vectors(sys: CoordSystem, c1: Poly, a1: int, c2: Poly, a2: int
                         ) -> list[tuple[Poly, int]]:
    """[c1 e_{a1}, c2 e_{a2}] as a list of (coefficient, axis) pieces."""
    out: list[tuple[Poly, int]] = []
    d2 = c2.partial_axis(a1)
    if not d2.is_zero():
        out.append((c1 * d2, a2))
    d1 = c1.partial_axis(a2)
    if not d1.is_zero():
        out.append((-(c2 * d1), a1))
    return out


def _accumulate(out: dict[Key, Poly], key_parts: list[int], coeff: Poly) -> None:
    # sort a repetition-free axis list, tracking the permutation sign
    key = list(key_parts)
    sign = 1
    for i in range(1, len(key)):
        j = i
        while j > 0 and key[j - 1] > key[j]:
            key[j - 1], key[j] = key[j], key[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(key)):
        if key[i - 1] == key[i]:
            return
    c = coeff if sign > 0 else -coeff
    k = tuple(key)
    s = out.get(k)
    s = c if s is None else s + c
    if s.is_zero():
        out.pop(k, None)
    else:
        out[k] = s


def schouten(x: MultiVector, y: MultiVector) -> MultiVector:
    """Schouten bracket of two multivector fields.

    Reduces to the Lie bracket on vector fields and is extended to
    decomposables by the graded Leibniz rule; see module docstring for the
    pinned sign normalisation.
    """
    _check_same_system(x.system, y.system)
    sys = x.system
    p, q = x.degree, y.degree
    deg = p + q - 1
    if deg < 0:
        return MultiVector.zero(sys, 0)
    if deg > sys.dim:
        return MultiVector.zero(sys, sys.dim)
    if p == 0 and q == 0:
        return MultiVector.zero(sys, 0)
    if p == 0:
        # graded antisymmetry off the q >= 1, function-argument case
        res = schouten(y, x)
        sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
        return res.scale(sign)

    out: dict[Key, Poly] = {}

    if q == 0:
        # [u_1^...^u_p, g] = sum_k (-1)^(p-k) (u_k g) u_1^...^u_k-hat^...^u_p
        for skey, sc in x.terms.items():
            for g in y.terms.values():
                for k_pos, a_k in enumerate(skey, start=1):
                    dg = g.partial_axis(a_k)
                    if dg.is_zero():
                        continue
                    coeff = sc * dg
                    if (p - k_pos) % 2:
                        coeff = -coeff
                    rest = [a for a in skey if a != a_k]
                    _accumulate(out, rest, coeff)
        return MultiVector._raw(sys, deg, out)

    for skey, sc in x.terms.items():
        for tkey, tc in y.terms.items():
            for k_pos, a_k in enumerate(skey, start=1):
                cu = sc if k_pos == 1 else Poly.const(sys, 1)
                for l_pos, b_l in enumerate(tkey, start=1):
                    cv = tc if l_pos == 1 else Poly.const(sys, 1)
                    pieces = _lie_bracket_vectors(sys, cu, a_k, cv, b_l)
                    if not pieces:
                        continue
                    rest_u = [a for a in skey if a != a_k]
                    rest_v = [b for b in tkey if b != b_l]
                    rest_coeff = Poly.const(sys, 1)
                    if k_pos != 1:
                        rest_coeff = rest_coeff * sc
                    if l_pos != 1:
                        rest_coeff = rest_coeff * tc
                    sign = -1 if (k_pos + l_pos) % 2 else 1
                    for piece_c, piece_a in pieces:
                        coeff = piece_c * rest_coeff
                        if sign < 0:
                            coeff = -coeff
                        _accumulate(out, [piece_a] + rest_u + rest_v, coeff)
    return MultiVector._raw(sys, deg, out)


# -- exact linear algebra and kernels -----------------------------------------


def rational_nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of the nullspace of a matrix over the rationals (RREF method).

    Deterministic: free columns are taken in increasing order and each basis
    vector has a 1 in its free column.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    pivot_of_col: dict[int, int] = {}
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col]
        m[r] = [v / inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivot_of_col[col] = r
        r += 1
        if r == nrows:
            break
    free_cols = [c for c in range(ncols) if c not in pivot_of_col]
    basis: list[list[Fraction]] = []
    for fc in free_cols:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for col, prow in pivot_of_col.items():
            v[col] = -m[prow][fc]
        basis.append(v)
    return basis


@dataclass
class KernelBasis:
    """Constant multivectors annihilating a form at a point under contraction."""

    point: Point
    degree: int
    basis: list[MultiVector]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def kernel_at_point(a: Form, r: int, pt: Point) -> KernelBasis:
    """Rational basis of constant r-multivectors Z with i_Z a = 0 at pt."""
    sys = a.system
    _check_same_system(sys, pt.system)
    if r > a.degree:
        raise ValueError("kernel degree exceeds form degree")
    a0 = a.evaluate(pt)
    cols = list(combinations(range(sys.dim), r))
    rows_keys = list(combinations(range(sys.dim), a.degree - r))
    row_index = {k: i for i, k in enumerate(rows_keys)}
    matrix = [[Fraction(0)] * len(cols) for _ in rows_keys]
    for j, skey in enumerate(cols):
        for tkey, p in a0.terms.items():
            hit = contract_key(skey, tkey)
            if hit is None:
                continue
            key, sign = hit
            matrix[row_index[key]][j] += sign * p.constant_value()
    null = rational_nullspace(matrix, len(cols))
    basis = []
    for vec in null:
        terms = {
            cols[j]: Poly.const(sys, v) for j, v in enumerate(vec) if v
        }
        basis.append(MultiVector(sys, r, terms))
    return KernelBasis(point=pt, degree=r, basis=basis)
