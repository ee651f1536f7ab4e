"""Signal models on finite varieties and their dense Fourier matrices.

A model is a quotient algebra with an ordered basis and an ordered list
of common zeros. The Fourier matrix has rows indexed by zeros and
columns by basis polynomials, entry b(alpha).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .chebyshev import ChebValues, cheb_expand, cheb_matrix_theta, weight_key
from .polycore import MultiPoly, poly_eval
from .weyl import FundamentalPoint, RootSystemData, coords, root_system

ZERO_TOL = 1e-9


def unit_root(num: int, den: int) -> complex:
    """exp(2 pi i num / den), exact at multiples of a quarter turn."""
    num %= den
    if (4 * num) % den == 0:
        return (1, 1j, -1, -1j)[4 * num // den]
    return complex(np.exp(2j * np.pi * num / den))


@dataclass(frozen=True)
class VarietyPoint:
    label: tuple[int, ...]
    xcoords: tuple[complex, ...]
    theta: FundamentalPoint | None = None


@dataclass(frozen=True, eq=False)
class SignalModel:
    name: str
    n: int
    nvars: int
    variety: tuple[VarietyPoint, ...]
    basis_labels: tuple[tuple[int, ...], ...]
    generator_labels: tuple = ()
    rs: RootSystemData | None = None
    params: dict = field(default_factory=dict)
    _basis_fn: Callable[["SignalModel"], list[MultiPoly]] | None = None
    _generator_fn: Callable[["SignalModel"], list[MultiPoly]] | None = None

    def __post_init__(self):
        if len(self.variety) != len(self.basis_labels):
            raise ValueError(f"{self.name}: {len(self.variety)} points but {len(self.basis_labels)} basis elements")

    @property
    def size(self) -> int:
        return len(self.variety)

    @cached_property
    def points(self) -> np.ndarray:
        return np.array([p.xcoords for p in self.variety], dtype=complex).reshape(self.size, self.nvars)

    @cached_property
    def basis(self) -> tuple[MultiPoly, ...]:
        return tuple(self._basis_fn(self)) if self._basis_fn else ()

    @cached_property
    def generators(self) -> tuple[MultiPoly, ...]:
        return tuple(self._generator_fn(self)) if self._generator_fn else ()

    def __repr__(self):
        return f"SignalModel({self.name}, n={self.n}, size={self.size})"


# univariate


def model_dft(n: int, sign: int = -1) -> SignalModel:
    """C[x]/<x^n - 1>, zeros exp(sign 2 pi i j / n), basis 1, x, ..., x^{n-1}.

    ``sign=-1`` gives the usual DFT matrix with entries exp(-2 pi i jk/n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    variety = tuple(VarietyPoint((j,), (unit_root(sign * j, n),)) for j in range(n))
    return SignalModel(
        name="dft",
        n=n,
        nvars=1,
        variety=variety,
        basis_labels=tuple((j,) for j in range(n)),
        generator_labels=((n,),),
        params={"sign": sign},
        _basis_fn=lambda m: [MultiPoly.monomial((j,)) for j in range(m.n)],
        _generator_fn=lambda m: [MultiPoly.monomial((m.n,)) - 1],
    )


def model_dct3(n: int) -> SignalModel:
    """C[x]/<T_n>, zeros cos(pi (2j+1) / (2n)), basis T_0, ..., T_{n-1}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rs = root_system("A1")
    variety = tuple(
        VarietyPoint((j,), (complex(np.cos(np.pi * (2 * j + 1) / (2 * n))),), FundamentalPoint(((2 * j + 1) / (4 * n),)))
        for j in range(n)
    )
    return SignalModel(
        name="dct3",
        n=n,
        nvars=1,
        variety=variety,
        basis_labels=tuple((j,) for j in range(n)),
        generator_labels=((n,),),
        rs=rs,
        _basis_fn=lambda m: [cheb_expand(m.rs, lab) for lab in m.basis_labels],
        _generator_fn=lambda m: [cheb_expand(m.rs, (m.n,))],
    )


# directed hexagonal lattice


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def model_hex(N: int, _allow_small: bool = False) -> SignalModel:
    """Directed hexagonal lattice with 3N x N samples.

    Entry for basis (n1, n2) and point (k1, k2):
    exp(-pi i ((2n1 - n2)(2k1 - k2) + 3 n2 k2) / (3N)), i.e. the kernel
    exp(-2 pi i n^T A k / (3N)) with A the A2 Cartan matrix. As a monomial
    x^{2n1 - n2} y^{n2} this is evaluation at
    (exp(-pi i (2k1 - k2)/(3N)), exp(-pi i k2 / N)). Every basis monomial
    has even total degree, so points are representatives modulo
    (x, y) -> (-x, -y). Negative x exponents are stored modulo 6N.
    """
    if not _is_pow2(N) or N < (2 if _allow_small else 4):
        raise ValueError("N must be a power of two >= 4")
    pts = []
    for k1 in range(3 * N):
        for k2 in range(N):
            pts.append(VarietyPoint((k1, k2), (unit_root(-(2 * k1 - k2), 6 * N), unit_root(-k2, 2 * N))))
    labels = tuple((n1, n2) for n1 in range(3 * N) for n2 in range(N))

    def basis(m):
        six = 6 * m.n
        return [MultiPoly.monomial(((2 * a - b) % six, b)) for a, b in m.basis_labels]

    def gens(m):
        N = m.n
        return [MultiPoly.monomial((3 * N, 0)) - MultiPoly.monomial((0, N)), MultiPoly.monomial((0, 2 * N)) - 1]

    return SignalModel(
        name="hex",
        n=N,
        nvars=2,
        variety=tuple(pts),
        basis_labels=labels,
        _basis_fn=basis,
        _generator_fn=gens,
    )


HEX_COUPLING = 3


def hex_entry(N: int, basis_label: Sequence[int], point_label: Sequence[int], coupling: int = HEX_COUPLING) -> complex:
    n1, n2 = basis_label
    k1, k2 = point_label
    return unit_root(-((2 * n1 - n2) * (2 * k1 - k2) + coupling * n2 * k2), 6 * N)


# Chebyshev models


def _cheb_model(name: str, rs: RootSystemData, n: int, thetas, basis_labels, gen_labels) -> SignalModel:
    variety = tuple(VarietyPoint(lab, tuple(coords(rs, c)), FundamentalPoint(c)) for lab, c in thetas)
    return SignalModel(
        name=name,
        n=n,
        nvars=rs.rank,
        variety=variety,
        basis_labels=tuple(basis_labels),
        generator_labels=tuple(gen_labels),
        rs=rs,
        _basis_fn=lambda m: [cheb_expand(m.rs, lab) for lab in m.basis_labels],
        _generator_fn=lambda m: [cheb_expand(m.rs, lab) for lab in m.generator_labels],
    )


def a2_thetas(n: int) -> list[tuple[tuple[int, ...], tuple[float, float]]]:
    out = []
    for fam, (off, bound) in enumerate(((1, 2), (2, 4))):
        for j in range(n):
            for k in range(n):
                if bound + 3 * (j + k) < 3 * n:
                    out.append(((fam, j, k), ((off + 3 * j) / (3 * n), (off + 3 * k) / (3 * n))))
    return out


def model_a2(n: int) -> SignalModel:
    """C[x,y]/<T_{n,0}, T_{0,n}> with basis T_{k,l}, k,l < n (lex)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rs = root_system("A2")
    basis = [(k, l) for k in range(n) for l in range(n)]
    return _cheb_model("a2", rs, n, a2_thetas(n), basis, [(n, 0), (0, n)])


def c2_thetas(n: int) -> list[tuple[tuple[int, ...], tuple[float, float]]]:
    # (2j+1)/(2n) on the coweight of the long simple root, k/(2n) on the other
    return [((j, k), (k / (2 * n), (2 * j + 1) / (2 * n))) for j in range(n) for k in range(n) if j + k < n]


def c2_basis(n: int) -> list[tuple[int, int]]:
    rs = root_system("C2")
    return sorted(((k, l) for k in range(n) for l in range(n) if k + l < n), key=lambda w: weight_key(rs, w))


def model_c2(n: int) -> SignalModel:
    """R[x1,x2]/<T_{k,l} : k+l = n> with basis T_{k,l}, k+l < n (m-degree, then lex)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rs = root_system("C2")
    gens = [(n - j, j) for j in range(n + 1)]
    return _cheb_model("c2", rs, n, c2_thetas(n), c2_basis(n), gens)


MODELS = {
    "dft": model_dft,
    "dct3": model_dct3,
    "hex": model_hex,
    "a2": model_a2,
    "c2": model_c2,
}


def build_model(name: str, n: int) -> SignalModel:
    try:
        return MODELS[name](n)
    except KeyError:
        raise ValueError(f"unknown model {name!r}") from None


# dense matrices


def thetas(model: SignalModel) -> np.ndarray | None:
    if any(p.theta is None for p in model.variety):
        return None
    return np.array([p.theta.barycentric for p in model.variety])


def cheb_matrix(model: SignalModel, weights) -> np.ndarray:
    """[T_w(alpha)] over the model's points.

    Uses the orbit sum at theta when every point carries one (the
    definition of T_w, accurate at any degree) and the shift recursion
    on x-coordinates otherwise.
    """
    th = thetas(model)
    if th is not None:
        return cheb_matrix_theta(model.rs, list(weights), th)
    return ChebValues(model.rs, model.points).matrix(list(weights))


def fourier_dense(model: SignalModel) -> np.ndarray:
    """P[r, c] = basis[c](variety[r]).

    Every branch computes the same quantity as ``poly_eval`` of the basis
    polynomial at the point; closed forms and the stable Chebyshev
    recursion are used where the monomial expansion would be inexact.
    """
    n = model.size
    if model.name == "dft":
        s = model.params.get("sign", -1)
        return np.array([[unit_root(s * r * c, n) for c in range(n)] for r in range(n)], dtype=complex)
    if model.name == "dct3":
        j = np.arange(n)[:, None]
        k = np.arange(n)[None, :]
        return np.cos(k * np.pi * (2 * j + 1) / (2 * n)).astype(complex)
    if model.name == "hex":
        return np.array(
            [[hex_entry(model.n, b, p.label) for b in model.basis_labels] for p in model.variety], dtype=complex
        )
    if model.rs is not None:
        return cheb_matrix(model, model.basis_labels)
    return np.array([[poly_eval(b, p.xcoords) for b in model.basis] for p in model.variety], dtype=complex)


def fourier_dense_by_eval(model: SignalModel) -> np.ndarray:
    """Reference matrix built term by term from the basis expansions."""
    return np.array([[poly_eval(b, p.xcoords) for b in model.basis] for p in model.variety], dtype=complex)


def generator_residuals(model: SignalModel) -> np.ndarray:
    """|g(alpha)| for every generator (columns) and point (rows)."""
    if model.rs is not None:
        return np.abs(cheb_matrix(model, model.generator_labels))
    return np.abs(np.array([[poly_eval(g, p.xcoords) for g in model.generators] for p in model.variety]))


def check_variety(model: SignalModel, tol: float = ZERO_TOL) -> float:
    res = float(generator_residuals(model).max(initial=0.0))
    if res >= tol:
        raise ValueError(f"{model.name}({model.n}): generator residual {res:.3e} exceeds {tol:g}")
    return res


def min_point_distance(model: SignalModel) -> float:
    X = model.points
    if len(X) < 2:
        return np.inf
    d = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def condition_number(model: SignalModel) -> float:
    c = float(np.linalg.cond(fourier_dense(model)))
    if not np.isfinite(c):
        raise ValueError(f"{model.name}({model.n}): Fourier matrix is singular")
    return c


def model_to_json(model: SignalModel) -> dict:
    return {
        "name": model.name,
        "n": model.n,
        "variety": [{"label": list(p.label), "x": [[z.real, z.imag] for z in map(complex, p.xcoords)]} for p in model.variety],
        "basis_labels": [list(b) for b in model.basis_labels],
    }
