"""Sparse multivariate polynomials with complex coefficients.

Polynomials are immutable maps from exponent tuples to complex
coefficients. Monomials are ordered by weighted degree (the m-degree)
with ties broken lexicographically, first variable most significant.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

PRUNE_TOL = 1e-14

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class MonomialOrder:
    """Weighted graded lexicographic order."""

    weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if any(w <= 0 for w in self.weights):
            raise ValueError("monomial weights must be positive")

    def key(self, exponents: Sequence[int]) -> tuple:
        return (mdeg(exponents, self), tuple(exponents))


def mdeg(exponents: Sequence[int], order: MonomialOrder) -> int:
    if len(exponents) != len(order.weights):
        raise ValueError("exponent length does not match order weights")
    return int(sum(e * w for e, w in zip(exponents, order.weights)))


def _clean(terms: Mapping[Exponent, complex]) -> dict[Exponent, complex]:
    return {e: complex(c) for e, c in terms.items() if abs(c) >= PRUNE_TOL}


@dataclass(frozen=True)
class MultiPoly:
    nvars: int
    terms: Mapping[Exponent, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.nvars < 1:
            raise ValueError("nvars must be positive")
        clean = {}
        for e, c in self.terms.items():
            e = tuple(int(v) for v in e)
            if len(e) != self.nvars:
                raise ValueError(f"exponent {e} has wrong length for {self.nvars} variables")
            if any(v < 0 for v in e):
                raise ValueError(f"negative exponent {e}")
            if abs(c) >= PRUNE_TOL:
                clean[e] = complex(c)
        object.__setattr__(self, "terms", MappingProxyType(clean))

    # constructors

    @classmethod
    def constant(cls, nvars: int, c: complex = 1.0) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c: complex = 1.0) -> "MultiPoly":
        return cls(len(exponents), {tuple(exponents): c})

    # arithmetic

    def _check(self, other: "MultiPoly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly.constant(self.nvars, complex(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0.0) + c
        return MultiPoly(self.nvars, _clean(out))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            return poly_mul(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __call__(self, *point):
        if len(point) == 1 and np.ndim(point[0]) == 1:
            point = point[0]
        return poly_eval(self, point)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # queries

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self, order: MonomialOrder | None = None) -> list[tuple[Exponent, complex]]:
        order = order or MonomialOrder((1,) * self.nvars)
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]))

    def leading_monomial(self, order: MonomialOrder) -> Exponent:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=order.key)

    def degree(self, order: MonomialOrder) -> int:
        return max((mdeg(e, order) for e in self.terms), default=0)

    def coeff(self, exponents: Sequence[int]) -> complex:
        return self.terms.get(tuple(exponents), 0.0)

    def max_abs_diff(self, other: "MultiPoly") -> float:
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.coeff(k) - other.coeff(k)) for k in keys), default=0.0)

    def real_part(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: c.real for e, c in self.terms.items()})

    def derivative(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = list(e)
            d[i] -= 1
            out[tuple(d)] = c * e[i]
        return MultiPoly(self.nvars, out)

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        parts = []
        for e, c in reversed(self.sorted_terms()):
            mono = "*".join(f"x{i + 1}^{p}" if p > 1 else f"x{i + 1}" for i, p in enumerate(e) if p)
            coef = f"{c.real:g}" if c.imag == 0 else f"({c:g})"
            parts.append(f"{coef}*{mono}" if mono else coef)
        return "MultiPoly(" + " + ".join(parts) + ")"


def poly_mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    a._check(b)
    out: dict[Exponent, complex] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0.0) + ca * cb
    return MultiPoly(a.nvars, _clean(out))


_FIX = 256  # fractional bits of the fixed-point accumulator


def _fix(v: float | Fraction) -> int:
    if isinstance(v, Fraction):
        return (v.numerator << _FIX) // v.denominator
    return int(math.ldexp(v, _FIX))


def _fix_pair(v) -> tuple[int, int]:
    if isinstance(v, Fraction):
        return (_fix(v), 0)
    v = complex(v)
    return (_fix(v.real), _fix(v.imag))


def poly_eval(p: MultiPoly, point: Sequence[complex]) -> complex:
    """Direct sum of coefficient times monomial value.

    Terms are visited in monomial order. Arithmetic runs on integers with
    256 fractional bits, so the result is the value at the given double
    inputs rounded once; cancellation between the large coefficients of
    high-degree Chebyshev expansions costs nothing. Real coordinates may
    be given as Fraction to evaluate beyond double precision.
    """
    point = list(point)
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {p.nvars} variables")
    xs = [_fix_pair(v) for v in point]
    powers = [[(1 << _FIX, 0)] for _ in xs]

    def power(j: int, k: int) -> tuple[int, int]:
        cache = powers[j]
        xr, xi = xs[j]
        while len(cache) <= k:
            a, b = cache[-1]
            cache.append(((a * xr - b * xi) >> _FIX, (a * xi + b * xr) >> _FIX))
        return cache[k]

    re = im = 0
    for e, c in p.sorted_terms():
        vr, vi = _fix(c.real), _fix(c.imag)
        for j, k in enumerate(e):
            if k:
                a, b = power(j, k)
                vr, vi = (vr * a - vi * b) >> _FIX, (vr * b + vi * a) >> _FIX
        re += vr
        im += vi
    return complex(float(Fraction(re, 1 << _FIX)), float(Fraction(im, 1 << _FIX)))


def poly_eval_many(p: MultiPoly, points: np.ndarray) -> np.ndarray:
    """Vectorized evaluation at the rows of ``points``."""
    points = np.asarray(points, dtype=complex)
    if points.ndim != 2 or points.shape[1] != p.nvars:
        raise ValueError("points must be an array of shape (npoints, nvars)")
    out = np.zeros(points.shape[0], dtype=complex)
    for e, c in p.sorted_terms():
        out += c * np.prod(points ** np.asarray(e), axis=1)
    return out


def _power(p: MultiPoly, k: int, cache: dict) -> MultiPoly:
    if k in cache:
        return cache[k]
    half = _power(p, k // 2, cache)
    r = poly_mul(half, half)
    if k % 2:
        r = poly_mul(r, p)
    cache[k] = r
    return r


def poly_compose(p: MultiPoly, subs: Sequence[MultiPoly]) -> MultiPoly:
    if len(subs) != p.nvars:
        raise ValueError(f"need {p.nvars} substitutions, got {len(subs)}")
    nv = {q.nvars for q in subs}
    if len(nv) != 1:
        raise ValueError("substituted polynomials must share nvars")
    nv = nv.pop()
    caches = [{0: MultiPoly.constant(nv), 1: q} for q in subs]
    out = MultiPoly(nv)
    for e, c in p.sorted_terms():
        term = MultiPoly.constant(nv, c)
        for q_cache, k in zip(caches, e):
            if k:
                term = poly_mul(term, _power(q_cache[1], k, q_cache))
        out = out + term
    return out


def from_terms(nvars: int, items: Iterable[tuple[Sequence[int], complex]]) -> MultiPoly:
    out: dict[Exponent, complex] = {}
    for e, c in items:
        e = tuple(e)
        out[e] = out.get(e, 0.0) + c
    return MultiPoly(nvars, out)
