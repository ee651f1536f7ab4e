"""Multivariate Chebyshev polynomials of the first kind.

T_lam is the Weyl-orbit average of exp(2 pi i <w lam, theta>), written
as a polynomial in x_k = T_{w_k}. Expansions are generated from the
shift property

    x_i T_lam = (1/|W|) sum_w T_{lam + w w_i},

which is triangular in the (m-degree, lex) order: the largest index on
the right is lam + w_i. Every index is brought to the dominant chamber
before lookup.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .polycore import MonomialOrder, MultiPoly, poly_compose, poly_eval, poly_eval_many
from .weyl import (
    FundamentalPoint,
    RootSystemData,
    coords,
    normalize_dominant,
    orbit_sum,
    random_fundamental_points,
    root_system,
)

Weight = tuple[int, ...]


def monomial_order(rs: RootSystemData) -> MonomialOrder:
    return MonomialOrder(rs.mdeg_weights)


def weight_mdeg(rs: RootSystemData, lam: Sequence[int]) -> int:
    return int(np.dot(rs.mdeg_weights, lam))


def weight_key(rs: RootSystemData, lam: Sequence[int]) -> tuple:
    return (weight_mdeg(rs, lam), tuple(lam))


def cheb_eval_direct(rs: RootSystemData, lam: Sequence[int], theta: FundamentalPoint | Sequence[float]) -> complex:
    c = theta.c if isinstance(theta, FundamentalPoint) else np.asarray(theta, dtype=float)
    return orbit_sum(rs, lam, c)


@lru_cache(maxsize=None)
def shift_terms(rs: RootSystemData, lam: Weight, i: int) -> tuple[tuple[Weight, float], ...]:
    """Coefficients c_mu with x_i T_lam = sum_mu c_mu T_mu, mu dominant."""
    lam = np.asarray(lam, dtype=int)
    omega = np.eye(rs.rank, dtype=int)[i]
    counts = Counter(normalize_dominant(rs, lam + w @ omega) for w in rs.elements)
    n = rs.order
    return tuple(sorted(((mu, k / n) for mu, k in counts.items()), key=lambda t: weight_key(rs, t[0])))


def _split_shift(rs: RootSystemData, mu: Weight) -> tuple[Weight, int, float, list[tuple[Weight, float]]]:
    """Express T_mu through x_i T_lam, lam = mu - e_i."""
    i = next(j for j, v in enumerate(mu) if v > 0)
    lam = tuple(v - (j == i) for j, v in enumerate(mu))
    lead = 0.0
    rest = []
    for nu, c in shift_terms(rs, lam, i):
        if nu == mu:
            lead = c
        else:
            rest.append((nu, c))
    if lead == 0.0:
        raise RuntimeError(f"shift relation for {mu} has no leading term")
    return lam, i, lead, rest


@dataclass
class ChebTable:
    """Memoised expansions T_lam as MultiPoly in the x variables."""

    rs: RootSystemData
    entries: dict[Weight, MultiPoly] = field(default_factory=dict)

    def __post_init__(self):
        d = self.rs.rank
        self.entries.setdefault((0,) * d, MultiPoly.constant(d))
        for k in range(d):
            self.entries.setdefault(tuple(int(j == k) for j in range(d)), MultiPoly.variable(d, k))

    def __getitem__(self, lam: Sequence[int]) -> MultiPoly:
        lam = tuple(int(v) for v in lam)
        if lam in self.entries:
            return self.entries[lam]
        if any(v < 0 for v in lam):
            raise ValueError(f"weight {lam} is not dominant")
        # iterative to keep the stack shallow at high degree
        stack = [lam]
        while stack:
            mu = stack[-1]
            if mu in self.entries:
                stack.pop()
                continue
            lo, i, lead, rest = _split_shift(self.rs, mu)
            missing = [nu for nu in [lo] + [nu for nu, _ in rest] if nu not in self.entries]
            if missing:
                stack.extend(missing)
                continue
            p = self.entries[lo] * MultiPoly.variable(self.rs.rank, i)
            for nu, c in rest:
                p = p - self.entries[nu] * c
            self.entries[mu] = p * (1.0 / lead)
            stack.pop()
        return self.entries[lam]


@lru_cache(maxsize=None)
def _table(kind: str) -> ChebTable:
    return ChebTable(root_system(kind))


def cheb_expand(rs: RootSystemData, lam: Sequence[int]) -> MultiPoly:
    if any(v < 0 for v in lam):
        raise ValueError(f"weight {tuple(lam)} is not dominant")
    return _table(rs.kind)[lam]


class ChebValues:
    """Numerical counterpart of ChebTable at a fixed set of points.

    Runs the same shift recursion on values instead of polynomials, which
    avoids the huge cancelling coefficients of the expansion. The
    recursion still amplifies rounding at high degree (for A2 about 1e-9
    at mdeg 28), so points that carry their angle theta are better
    evaluated with ``cheb_matrix_theta``.
    """

    def __init__(self, rs: RootSystemData, points: np.ndarray):
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        if points.shape[1] != rs.rank:
            raise ValueError("points must have one column per variable")
        self.rs = rs
        self.points = points
        d = rs.rank
        self.values: dict[Weight, np.ndarray] = {(0,) * d: np.ones(len(points), dtype=complex)}
        for k in range(d):
            self.values[tuple(int(j == k) for j in range(d))] = points[:, k].copy()

    def __getitem__(self, lam: Sequence[int]) -> np.ndarray:
        lam = tuple(int(v) for v in lam)
        if lam in self.values:
            return self.values[lam]
        stack = [lam]
        while stack:
            mu = stack[-1]
            if mu in self.values:
                stack.pop()
                continue
            lo, i, lead, rest = _split_shift(self.rs, mu)
            missing = [nu for nu in [lo] + [nu for nu, _ in rest] if nu not in self.values]
            if missing:
                stack.extend(missing)
                continue
            v = self.values[lo] * self.points[:, i]
            for nu, c in rest:
                v = v - c * self.values[nu]
            self.values[mu] = v / lead
            stack.pop()
        return self.values[lam]

    def matrix(self, weights: Sequence[Sequence[int]]) -> np.ndarray:
        return np.column_stack([self[w] for w in weights]) if weights else np.zeros((len(self.points), 0), complex)


def cheb_values(rs: RootSystemData, weights: Sequence[Sequence[int]], points: np.ndarray) -> np.ndarray:
    """Matrix [T_w(p)] with rows indexed by points and columns by weights."""
    return ChebValues(rs, points).matrix(list(weights))


def cheb_matrix_theta(rs: RootSystemData, weights: Sequence[Sequence[int]], thetas: np.ndarray) -> np.ndarray:
    """Orbit sums [T_w(theta_p)] for barycentric points theta_p (rows)."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    lam = np.asarray(weights, dtype=float).reshape(-1, rs.rank)
    out = np.zeros((thetas.shape[0], lam.shape[0]), dtype=complex)
    for S in rs.elements:
        out += np.exp(2j * np.pi * (thetas @ rs.pairing.T) @ (lam @ S.T).T)
    out /= rs.order
    if rs.kind != "A2":
        out = out.real.astype(complex)
    return out


def level(k: int) -> list[Weight]:
    """Basis of level k, ordered by descending first index."""
    return [(k - j, j) for j in range(k + 1)]


@dataclass(frozen=True)
class RecurrenceMatrices:
    k: int
    i: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


def shift_matrices(rs: RootSystemData, k: int, i: int) -> RecurrenceMatrices:
    """x_i T_k = A T_{k+1} + B T_k + C T_{k-1} for the level bases of C2.

    ``i`` is the variable index counted from 1.
    """
    if rs.kind != "C2":
        raise ValueError("three-term recurrence matrices are implemented for C2")
    if k < 0 or i not in (1, 2):
        raise ValueError("need k >= 0 and i in {1, 2}")
    rows = level(k)
    cols = {k + 1: level(k + 1), k: rows, k - 1: level(k - 1) if k else []}
    index = {lv: {w: j for j, w in enumerate(ws)} for lv, ws in cols.items()}
    mats = {lv: np.zeros((len(rows), len(ws))) for lv, ws in cols.items()}
    for r, lam in enumerate(rows):
        for mu, c in shift_terms(rs, lam, i - 1):
            lv = sum(mu)
            if lv not in index:
                raise RuntimeError(f"shift of {lam} reaches level {lv}")
            mats[lv][r, index[lv][mu]] += c
    return RecurrenceMatrices(k, i, mats[k + 1], mats[k], mats[k - 1])


@dataclass(frozen=True)
class HMatrices:
    H: tuple[np.ndarray, ...]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.H[k]

    def __len__(self):
        return len(self.H)


def h_matrices(rs: RootSystemData, n: int) -> HMatrices:
    if rs.kind != "C2":
        raise ValueError("H matrices are tabulated for C2")
    if n < 0:
        raise ValueError("n must be non-negative")
    H = [np.array([[0.5]])]
    for k in range(1, n + 1):
        d = np.full(k + 1, 1 / 16)
        d[0] = d[-1] = 1 / 8
        H.append(np.diag(d))
    return HMatrices(tuple(H))


def decomposition_check(
    rs: RootSystemData,
    lam: Sequence[int],
    k: int,
    samples: int | np.ndarray = 50,
    seed: int = 0,
) -> float:
    """max |T_{k lam}(x) - T_lam(T_{k w_1}(x), ...)| over sample points."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(samples, (int, np.integer)):
        rng = np.random.default_rng(seed)
        pts = np.array([coords(rs, c) for c in random_fundamental_points(rs, int(samples), rng)])
    else:
        pts = np.atleast_2d(np.asarray(samples, dtype=complex))
    d = rs.rank
    big = cheb_expand(rs, tuple(k * v for v in lam))
    inner = [cheb_expand(rs, tuple(k * int(j == q) for j in range(d))) for q in range(d)]
    composed = poly_compose(cheb_expand(rs, lam), inner)
    return float(np.max(np.abs(poly_eval_many(big, pts) - poly_eval_many(composed, pts))))


def dominant_weights(rs: RootSystemData, max_mdeg: int) -> list[Weight]:
    d = rs.rank
    w = rs.mdeg_weights
    out = []
    if d == 1:
        out = [(a,) for a in range(max_mdeg + 1)]
    else:
        for a in range(max_mdeg // w[0] + 1):
            for b in range((max_mdeg - a * w[0]) // w[1] + 1):
                out.append((a, b))
    return sorted(out, key=lambda lam: weight_key(rs, lam))


def expansion_error(rs: RootSystemData, lam: Sequence[int], thetas: np.ndarray) -> float:
    p = cheb_expand(rs, lam)
    err = 0.0
    for c in thetas:
        err = max(err, abs(poly_eval(p, coords(rs, c)) - cheb_eval_direct(rs, lam, c)))
    return err
