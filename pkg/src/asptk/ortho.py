"""Christoffel-Darboux kernel and Gauss-Jacobi orthogonalization for C2.

Level k collects T_{a,b} with a + b = k, ordered by descending a. With
the constant matrices H_0 = 1/2, H_k = diag(1/8, 1/16, ..., 1/16, 1/8)
the kernel

    K_n(x, y) = sum_{k <= n} T_k(x)^T H_k^{-1} T_k(y)

has the two-branch closed form implemented in ``cd_kernel``. At the
common zeros of T_n the kernel K_{n-1} is diagonal, which is what makes
sqrt(H^+) F sqrt(D) orthogonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np

from .chebyshev import HMatrices, RecurrenceMatrices, cheb_expand, h_matrices, level, shift_matrices
from .models import SignalModel, fourier_dense, model_c2
from .polycore import MultiPoly, poly_eval
from .weyl import RootSystemData, root_system

COINCIDE_TOL = 1e-10
SMALL_ENTRY = 1e-12
ORTHO_FAIL = 1e-6


class UnsupportedModelError(ValueError):
    pass


class OrthogonalityError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CDContext:
    rs: RootSystemData
    n: int
    rec: dict[tuple[int, int], RecurrenceMatrices]
    H: HMatrices
    stacks: tuple[tuple[MultiPoly, ...], ...]  # levels 0..n+1

    @cached_property
    def dstacks(self) -> dict[int, tuple[tuple[MultiPoly, ...], ...]]:
        return {i: tuple(tuple(p.derivative(i - 1) for p in st) for st in self.stacks) for i in (1, 2)}

    @cached_property
    def Hinv(self) -> tuple[np.ndarray, ...]:
        return tuple(np.linalg.inv(h) for h in self.H.H)

    def A(self, k: int, i: int) -> np.ndarray:
        return self.rec[(k, i)].A

    def stack(self, k: int, x) -> np.ndarray:
        return np.array([poly_eval(p, x) for p in self.stacks[k]])

    def dstack(self, k: int, i: int, x) -> np.ndarray:
        return np.array([poly_eval(p, x) for p in self.dstacks[i][k]])


def cd_context(n: int, kind: str = "C2") -> CDContext:
    if kind.upper() != "C2":
        raise UnsupportedModelError("Gauss-Jacobi orthogonalization is implemented for C2 only")
    if n < 0:
        raise ValueError("n must be non-negative")
    rs = root_system("C2")
    rec = {(k, i): shift_matrices(rs, k, i) for k in range(n + 1) for i in (1, 2)}
    stacks = tuple(tuple(cheb_expand(rs, w) for w in level(k)) for k in range(n + 2))
    return CDContext(rs, n, rec, h_matrices(rs, n), stacks)


def _pt(x) -> tuple:
    if all(isinstance(v, Fraction) for v in x):
        return tuple(x)
    x = np.asarray(x, dtype=complex).real
    return (float(x[0]), float(x[1]))


EXACT_BITS = 320


def exact_zero_coords(model: SignalModel) -> list[tuple[Fraction, Fraction]]:
    """Zero coordinates to EXACT_BITS bits, as Fractions.

    Double-rounded zeros are not enough at n = 16: T_n has integer
    coefficients near 2^44, so the derivative stacks would inherit the
    rounding of the point. The angles are rational, which lets mpmath
    produce the cosines to any precision.
    """
    rs = model.rs
    out = []
    G = [[Fraction(v).limit_denominator(64) for v in row] for row in rs.pairing]
    weights = [[[int(v) for v in S @ np.eye(rs.rank, dtype=int)[k]] for S in rs.elements] for k in range(rs.rank)]
    with mpmath.workprec(EXACT_BITS + 32):
        for vp in model.variety:
            c = [Fraction(v).limit_denominator(1 << 20) for v in vp.theta.c]
            coords = []
            for k in range(rs.rank):
                total = mpmath.mpf(0)
                for lam in weights[k]:
                    ph = sum(lam[a] * G[a][b] * c[b] for a in range(rs.rank) for b in range(rs.rank))
                    total += mpmath.cos(2 * mpmath.pi * mpmath.mpf(ph.numerator) / ph.denominator)
                v = total / rs.order
                coords.append(Fraction(int(mpmath.nint(mpmath.ldexp(v, EXACT_BITS))), 1 << EXACT_BITS))
            out.append(tuple(coords))
    return out


def cd_left(ctx: CDContext, x, y) -> float:
    """Direct sum over levels 0..n."""
    x, y = _pt(x), _pt(y)
    return float(sum((ctx.stack(k, x) @ ctx.Hinv[k] @ ctx.stack(k, y)).real for k in range(ctx.n + 1)))


def cd_kernel(ctx: CDContext, x, y, i: int = 1, confluent: bool | None = None) -> float:
    """Closed form of K_n(x, y) using variable i (1-based).

    ``confluent=None`` picks the branch from x == y.
    """
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    x, y = _pt(x), _pt(y)
    n = ctx.n
    A, Hn = ctx.A(n, i), ctx.Hinv[n]
    if confluent is None:
        confluent = x == y
    if confluent:
        t = ctx.stack(n, x)
        return float(
            (t @ Hn @ A @ ctx.dstack(n + 1, i, x) - (A @ ctx.stack(n + 1, x)) @ Hn @ ctx.dstack(n, i, x)).real
        )
    d = x[i - 1] - y[i - 1]
    if abs(d) < COINCIDE_TOL:
        raise ValueError(f"|x_{i} - y_{i}| < {COINCIDE_TOL:g}: use the confluent branch")
    num = (A @ ctx.stack(n + 1, x)) @ Hn @ ctx.stack(n, y) - ctx.stack(n, x) @ Hn @ A @ ctx.stack(n + 1, y)
    return float(num.real / d)


def gj_diagonal(model: SignalModel, i: int = 1, ctx: CDContext | None = None) -> np.ndarray:
    """D_n: one entry 1 / (T_{n-1}^T H_{n-1}^{-1} A_{n-1,i} d_i T_n) per zero."""
    if model.name != "c2":
        raise UnsupportedModelError(f"no Gauss-Jacobi diagonal for model {model.name!r}")
    n = model.n
    if ctx is None or ctx.n != n - 1:
        ctx = cd_context(n - 1)
    A, Hn = ctx.A(n - 1, i), ctx.Hinv[n - 1]
    out = np.empty(model.size)
    for a, x in enumerate(exact_zero_coords(model)):
        v = float((ctx.stack(n - 1, x) @ Hn @ A @ ctx.dstack(n, i, x)).real)
        if abs(v) < SMALL_ENTRY:
            raise OrthogonalityError(f"zero {model.variety[a].label} looks non-simple (entry {v:.2e})")
        out[a] = 1.0 / v
    if not np.all(out > 0):
        raise OrthogonalityError("Gauss-Jacobi diagonal has non-positive entries")
    return out


def h_direct_sum_diag(n: int) -> np.ndarray:
    """Diagonal of the direct sum of H_k^{-1}, k < n, in the model's basis order."""
    H = h_matrices(root_system("C2"), max(n - 1, 0))
    pos = {}
    for k in range(n):
        for j, w in enumerate(level(k)):
            pos[w] = 1.0 / H[k][j, j]
    return np.array([pos[w] for w in model_c2(n).basis_labels])


@dataclass(frozen=True)
class OrthoResult:
    M: np.ndarray
    D: np.ndarray
    residual: float
    orientation: str = "M = sqrt(H+) F^T sqrt(D) with F points x basis; M^T M = I over points"


def orthogonalize(n: int, F: np.ndarray | None = None, i: int = 1, tol: float = ORTHO_FAIL) -> OrthoResult:
    model = model_c2(n)
    if F is None:
        F = fourier_dense(model)
    F = np.asarray(F)
    if F.shape != (model.size, model.size):
        raise ValueError("F must be the square Fourier matrix of model_c2(n)")
    h = h_direct_sum_diag(n)
    D = gj_diagonal(model, i)
    if not (np.all(h > 0) and np.all(D > 0)):
        raise OrthogonalityError("square roots need positive entries")
    M = np.sqrt(h[:, None] * D[None, :]) * F.T.real
    res = float(np.max(np.abs(M.T @ M - np.eye(len(M))), initial=0.0))
    if res > tol:
        raise OrthogonalityError(f"orthogonality residual {res:.3e} exceeds {tol:g}")
    return OrthoResult(M, D, res)
