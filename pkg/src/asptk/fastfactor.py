"""Sparse factorizations of Fourier matrices.

Two constructions are implemented.

Bottom-up (induction). If the module is induced from a submodule along a
transversal t_1..t_w, then

    F = [D_1 R_1 | ... | D_w R_w] (F_sub ⊕ ... ⊕ F_sub) B

with D_t = diag(t(alpha)), R_t the 0/1 routing matrix of the point map
r_t and B the change from the original basis to the induced one.

Top-down (decomposition). If the ideal factors through an inner map r,
the points split into fibres over the zeros beta_i of the outer ideal
and

    F = P (F_1 ⊕ ... ⊕ F_k) T B

where F_i are the skew transforms on the fibres, T is the block matrix
with block (i, j) equal to c_ij times a zero-padded identity and P
reorders the concatenated fibres into the model's order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chebyshev import cheb_matrix_theta, weight_key
from .models import (
    SignalModel,
    fourier_dense,
    model_a2,
    model_c2,
    model_dft,
    model_hex,
    thetas,
    unit_root,
)
from .sparse import SparseMatrix, block_diag, hstack
from .weyl import RootSystemData, normalize_dominant, root_system

ROLES = ("permutation", "basis_change", "block_diag_fourier", "routing_scaled", "block_T", "diag")
MATCH_TOL = 1e-8
SNAP_TOL = 1e-12


class FactorizationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FactorPlan:
    model: str
    n: int
    factors: tuple[SparseMatrix, ...]
    roles: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.factors) != len(self.roles):
            raise ValueError("one role per factor")
        for r in self.roles:
            if r not in ROLES:
                raise ValueError(f"unknown role {r!r}")
        for a, b in zip(self.factors, self.factors[1:]):
            if a.shape[1] != b.shape[0]:
                raise ValueError(f"factor shapes do not compose: {a.shape} then {b.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.factors[0].shape[0], self.factors[-1].shape[1])

    @property
    def nnz(self) -> int:
        return sum(f.nnz for f in self.factors)

    def product(self) -> np.ndarray:
        out = self.factors[-1].to_dense()
        for f in reversed(self.factors[:-1]):
            out = f @ out
        return np.asarray(out)

    def apply(self, v: np.ndarray) -> np.ndarray:
        for f in reversed(self.factors):
            v = f @ v
        return v

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "factors": [
                {"role": role, "shape": list(f.shape), "coo": [[r, c, v.real, v.imag] for r, c, v in f.triples]}
                for f, role in zip(self.factors, self.roles)
            ],
        }


@dataclass(frozen=True)
class VerifyReport:
    max_abs_error: float
    rel_error: float
    nnz_total: int
    nnz_per_factor: tuple[int, ...]
    naive_nnz: int

    def ok(self, tol: float) -> bool:
        return self.rel_error < tol

    def as_dict(self) -> dict:
        return {
            "max_abs_error": self.max_abs_error,
            "rel_error": self.rel_error,
            "nnz_total": self.nnz_total,
            "nnz_per_factor": list(self.nnz_per_factor),
            "naive_nnz": self.naive_nnz,
            "speedup_ratio": self.naive_nnz / max(self.nnz_total, 1),
        }


def verify_plan(plan: FactorPlan, dense: np.ndarray, tol: float | None = None) -> VerifyReport:
    dense = np.asarray(dense)
    if plan.shape != dense.shape:
        raise ValueError(f"plan shape {plan.shape} does not match dense shape {dense.shape}")
    err = float(np.max(np.abs(plan.product() - dense), initial=0.0))
    scale = float(np.max(np.abs(dense), initial=0.0)) or 1.0
    rep = VerifyReport(
        max_abs_error=err,
        rel_error=err / scale,
        nnz_total=plan.nnz,
        nnz_per_factor=tuple(f.nnz for f in plan.factors),
        naive_nnz=int(np.count_nonzero(np.abs(dense) > 0)),
    )
    if tol is not None and not rep.ok(tol):
        raise FactorizationError(f"{plan.model}({plan.n}): relative error {rep.rel_error:.3e} exceeds {tol:g}")
    return rep


# helpers


def _snap(a: np.ndarray, rel: float = SNAP_TOL) -> SparseMatrix:
    a = np.array(a, dtype=complex)
    scale = np.max(np.abs(a), initial=0.0)
    a[np.abs(a) < rel * max(scale, 1.0)] = 0
    # exact zeros in the real or imaginary part help the golden comparisons
    for part in (a.real, a.imag):
        near = np.abs(part - np.round(part)) < rel
        part[near] = np.round(part[near])
    return SparseMatrix.from_dense(a)


def match_points(values: np.ndarray, targets: np.ndarray, tol: float = MATCH_TOL) -> np.ndarray:
    """Index of the nearest target for each value row; ambiguity is an error."""
    values = np.atleast_2d(values)
    targets = np.atleast_2d(targets)
    d = np.linalg.norm(values[:, None, :] - targets[None, :, :], axis=2)
    idx = np.argmin(d, axis=1)
    best = d[np.arange(len(values)), idx]
    if np.any(best > tol):
        raise FactorizationError(f"point has no match within {tol:g} (distance {best.max():.3e})")
    if d.shape[1] > 1:
        second = np.partition(d, 1, axis=1)[:, 1]
        if np.any(second <= tol):
            raise FactorizationError("ambiguous point match")
    return idx


def _cluster(values: np.ndarray, tol: float = MATCH_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Group equal rows; returns (group index per row, representative rows)."""
    reps: list[np.ndarray] = []
    lab = np.empty(len(values), dtype=int)
    for i, v in enumerate(values):
        for g, r in enumerate(reps):
            if np.linalg.norm(v - r) <= tol:
                lab[i] = g
                break
        else:
            reps.append(v)
            lab[i] = len(reps) - 1
    return lab, np.array(reps)


def _solve_basis_change(E: np.ndarray, F: np.ndarray) -> SparseMatrix:
    cond = np.linalg.cond(E)
    if not np.isfinite(cond) or cond > 1e12:
        raise FactorizationError(f"induced basis is singular on the variety (cond {cond:.2e})")
    return _snap(np.linalg.solve(E, F))


def _routing_block(t_values: np.ndarray, route: np.ndarray, n_sub: int) -> SparseMatrix:
    n = len(route)
    return SparseMatrix.from_triples((n, n_sub), [(a, int(route[a]), t_values[a]) for a in range(n)])


def _induced_plan(name, n, F, t_values, routes, sub_mats, meta) -> FactorPlan:
    """Assemble the three bottom-up factors; B is solved from the evaluations."""
    if sum(sm.shape[0] for sm in sub_mats) != F.shape[1]:
        raise FactorizationError("transversal fails the dimension count")
    for rt, sm in zip(routes, sub_mats):
        if len(np.unique(rt)) != sm.shape[0]:
            raise FactorizationError("point map is not onto the subvariety")
    left = hstack([_routing_block(tv, rt, sm.shape[0]) for tv, rt, sm in zip(t_values, routes, sub_mats)])
    middle = block_diag(sub_mats)
    E = (left @ middle).to_dense()
    B = _solve_basis_change(E, F)
    perm = bool(B.is_permutation())
    meta = dict(
        meta,
        routing_nnz_per_row=left.max_row_nnz(),
        routes=[rt.tolist() for rt in routes],
        B_is_permutation=perm,
    )
    roles = ("routing_scaled", "block_diag_fourier", "permutation" if perm else "basis_change")
    return FactorPlan(name, n, (left, middle, B), roles, meta)


# bottom-up


def _dft_bottom_up(model: SignalModel, r: int) -> FactorPlan:
    n = model.n
    if n % r:
        raise FactorizationError(f"radix {r} does not divide {n}")
    m = n // r
    s = model.params.get("sign", -1)
    # point j maps to j mod m under x -> x^r; t = x^a scales by alpha_j^a
    left = SparseMatrix.from_triples(
        (n, n), [(j, a * m + j % m, unit_root(s * j * a, n)) for j in range(n) for a in range(r)]
    )
    sub = fourier_dense(model_dft(m, s))
    middle = block_diag([sub] * r)
    # x^i = x^a y^b with i = a + r b sits at position a m + b
    cols = [0] * n
    for i in range(n):
        cols[(i % r) * m + i // r] = i
    B = SparseMatrix.permutation(cols)
    return FactorPlan(
        "dft",
        n,
        (left, middle, B),
        ("routing_scaled", "block_diag_fourier", "permutation"),
        {"method": "bottom-up", "radix": r, "transversal": [f"x^{a}" for a in range(r)]},
    )


def _hex_bottom_up(model: SignalModel) -> FactorPlan:
    N = model.n
    sub = model_hex(N // 2, _allow_small=True)
    X = model.points
    x, y = X[:, 0], X[:, 1]
    # transversal 1, x^2, x y, x^-1 y acting on S = C[r^2, r s], r = x^2, s = y^2
    t_values = [np.ones_like(x), x**2, x * y, y / x]
    img = np.column_stack([x**2, y**2])
    subX = sub.points
    # points are representatives up to a global sign: compare (r^2, r s)
    inv = lambda P: np.column_stack([P[:, 0] ** 2, P[:, 0] * P[:, 1]])
    route = match_points(inv(img), inv(subX))
    F_sub = fourier_dense(sub)
    return _induced_plan(
        "hex",
        N,
        fourier_dense(model),
        t_values,
        [route] * 4,
        [F_sub] * 4,
        {"method": "bottom-up", "transversal": ["1", "x^2", "x y", "x^-1 y"]},
    )


def _a2_bottom_up(model: SignalModel) -> FactorPlan:
    n = model.n
    if n % 2:
        raise FactorizationError("A2 bottom-up needs even n")
    m = n // 2
    rs = model.rs
    th = thetas(model)
    trans = [(0, 0), (1, 0), (0, 1), (1, 1)]
    tv = cheb_matrix_theta(rs, trans, th)
    # y = (T_{2,0}, T_{0,2}) maps V(T_{n,0}, T_{0,n}) onto V(T_{m,0}, T_{0,m})
    img = cheb_matrix_theta(rs, [(2, 0), (0, 2)], th)
    sub = model_a2(m)
    route = match_points(img, sub.points)
    F_sub = fourier_dense(sub)
    return _induced_plan(
        "a2",
        n,
        fourier_dense(model),
        [tv[:, k] for k in range(4)],
        [route] * 4,
        [F_sub] * 4,
        {"method": "bottom-up", "transversal": [f"T{t}" for t in trans]},
    )


def factor_bottom_up(model: SignalModel, radix: int = 2) -> FactorPlan:
    if model.name == "dft":
        return _dft_bottom_up(model, radix)
    if model.name == "hex":
        return _hex_bottom_up(model)
    if model.name == "a2":
        return _a2_bottom_up(model)
    raise FactorizationError(f"no bottom-up factorization for model {model.name!r}")


# top-down


def _dft_top_down(model: SignalModel, r: int = 2) -> FactorPlan:
    n = model.n
    if n % r:
        raise FactorizationError(f"radix {r} does not divide {n}")
    m = n // r
    s = model.params.get("sign", -1)
    # x^n - 1 = q(x^m) with q = y^r - 1; fibre i: x^m = beta_i = e^{2 pi i b_i / r}
    blocks, cols = [], []
    for i in range(r):
        b = (s * i) % r
        expo = [b + s * k * r for k in range(m)]  # roots e^{2 pi i e / n}
        blocks.append(np.array([[unit_root(a * e, n) for a in range(m)] for e in expo], dtype=complex))
        cols.extend((s * e) % n for e in expo)
    # row j of P picks the concatenated position of point j
    pos = {j: p for p, j in enumerate(cols)}
    P = SparseMatrix.permutation([pos[j] for j in range(n)])
    c = fourier_dense(model_dft(r, s))
    T = SparseMatrix.from_dense(np.kron(c, np.eye(m)))
    return FactorPlan(
        "dft",
        n,
        (P, block_diag(blocks), T),
        ("permutation", "block_diag_fourier", "block_T"),
        {"method": "top-down", "radix": r, "block_dims": [m] * r},
    )


def nested_basis(rs: RootSystemData, m: int) -> list[tuple[int, int]]:
    """Weights k, l < m with {k + l < m} first (C2) or plain lex (A2)."""
    full = [(k, l) for k in range(m) for l in range(m)]
    if rs.kind == "A2":
        return full
    key = lambda w: weight_key(rs, w)
    return sorted((w for w in full if sum(w) < m), key=key) + sorted((w for w in full if sum(w) >= m), key=key)


def _u_candidates(rs: RootSystemData, w: int) -> list[tuple[int, int]]:
    if w == 3 and rs.kind == "C2":
        return [(1, 0), (0, 1), (0, 0)]
    if w == 4:
        return [(0, 0), (0, 1), (1, 0), (1, 1)]
    cands = sorted(((a, b) for a in range(w) for b in range(w)), key=lambda x: weight_key(rs, x))
    return cands[:w]


def _t_valid(c: np.ndarray, sizes: Sequence[int]) -> float:
    """Worst condition number over the trailing blocks used by T."""
    worst = 0.0
    for s in sorted(set(sizes)):
        idx = [i for i, d in enumerate(sizes) if d >= s]
        worst = max(worst, np.linalg.cond(c[np.ix_(idx, idx)]))
    return worst


@dataclass
class SplitResult:
    P: SparseMatrix
    child_thetas: list[np.ndarray]
    child_bases: list[list[tuple[int, int]]]
    child_mats: list[np.ndarray]
    T: SparseMatrix
    B: SparseMatrix
    sizes: list[int]
    labels: list
    u: list[tuple[int, int]]
    c: np.ndarray


def split_node(
    rs: RootSystemData,
    th: np.ndarray,
    basis: Sequence[tuple[int, int]],
    L: int,
    q_model: SignalModel | None = None,
) -> SplitResult:
    """One top-down step for C[x]/<T_{L,0} - a, T_{0,L} - b> on the points th.

    The inner map is r = (T_{h,0}, T_{0,h}) with h = L/2. New basis
    elements are e_{j,s} = u_j(r(x)) L_s(x) [s < d(fibre of x)] with L the
    nested child basis, so the restriction of e_{j,s} to fibre i is
    c_ij L_s for s < min(d_i, d_j) and 0 otherwise.
    """
    if L % 2:
        raise FactorizationError("top-down step needs an even level")
    h = L // 2
    N = len(th)
    Y = cheb_matrix_theta(rs, [(h, 0), (0, h)], th)
    lab, reps = _cluster(Y)
    w = len(reps)
    sizes_raw = [int(np.sum(lab == g)) for g in range(w)]
    if q_model is not None:
        labels = [q_model.variety[i].label for i in match_points(reps, q_model.points)]
    else:
        labels = list(range(w))
    order = sorted(range(w), key=lambda g: (sizes_raw[g], labels[g]))
    sizes = [sizes_raw[g] for g in order]
    nested = nested_basis(rs, h)
    if max(sizes) > len(nested):
        raise FactorizationError(f"fibre of size {max(sizes)} exceeds the child basis")
    first = [int(np.flatnonzero(lab == g)[0]) for g in order]
    cands = _u_candidates(rs, w)
    U = cheb_matrix_theta(rs, [(a * h, b * h) for a, b in cands], th[first])
    best = None
    for perm in itertools.islice(itertools.permutations(range(w)), 5040):
        cnd = _t_valid(U[:, perm], sizes)
        if cnd < 1e8:
            best = perm
            break
    if best is None:
        raise FactorizationError("no invertible outer basis for this split")
    u = [cands[j] for j in best]
    c = U[:, list(best)]

    # evaluations
    Lval = cheb_matrix_theta(rs, nested[: max(sizes)], th)
    gpos = {g: i for i, g in enumerate(order)}
    gi = np.array([gpos[g] for g in lab])
    offs = np.concatenate([[0], np.cumsum(sizes)])
    E = np.zeros((N, N), dtype=complex)
    for j, dj in enumerate(sizes):
        for s_ in range(dj):
            mask = np.array(sizes)[gi] > s_
            E[:, offs[j] + s_] = c[gi, j] * Lval[:, s_] * mask
    Fold = cheb_matrix_theta(rs, list(basis), th)
    B = _solve_basis_change(E, Fold)

    cols = []
    child_thetas, child_bases, child_mats = [], [], []
    for g in order:
        idx = np.flatnonzero(lab == g)
        cols.extend(idx.tolist())
        d = len(idx)
        child_thetas.append(th[idx])
        child_bases.append(nested[:d])
        child_mats.append(Lval[np.ix_(idx, np.arange(d))])
    pos = np.empty(N, dtype=int)
    pos[cols] = np.arange(N)
    P = SparseMatrix.permutation(pos.tolist())
    triples = []
    for i, di in enumerate(sizes):
        for j, dj in enumerate(sizes):
            for s_ in range(min(di, dj)):
                triples.append((offs[i] + s_, offs[j] + s_, c[i, j]))
    T = SparseMatrix.from_triples((N, N), triples)
    for M in child_mats:
        if np.linalg.cond(M) > 1e8:
            raise FactorizationError("skew transform block is ill-conditioned")
    return SplitResult(P, child_thetas, child_bases, child_mats, T, B, sizes, [labels[g] for g in order], u, c)


def _cheb_top_down(model: SignalModel) -> FactorPlan:
    n = model.n
    if n % 2:
        raise FactorizationError("top-down needs even n")
    q = model_a2(2) if model.name == "a2" else model_c2(2)
    sp = split_node(model.rs, thetas(model), model.basis_labels, n, q_model=q)
    return FactorPlan(
        model.name,
        n,
        (sp.P, block_diag(sp.child_mats), sp.T, sp.B),
        ("permutation", "block_diag_fourier", "block_T", "basis_change"),
        {"method": "top-down", "block_dims": sp.sizes, "block_labels": sp.labels, "outer_basis": sp.u},
    )


def factor_top_down(model: SignalModel) -> FactorPlan:
    if model.name == "dft":
        return _dft_top_down(model)
    if model.name in ("a2", "c2"):
        return _cheb_top_down(model)
    raise FactorizationError(f"no top-down factorization for model {model.name!r}")


# recursion


def _stack_levels(children: list[list[tuple[SparseMatrix, str]]]) -> list[tuple[SparseMatrix, str]]:
    depth = max(len(c) for c in children)
    padded = []
    for c in children:
        dim = c[0][0].shape[0]
        padded.append([(SparseMatrix.identity(dim), "permutation")] * (depth - len(c)) + c)
    out = []
    for lv in range(depth):
        mats = [c[lv][0] for c in padded]
        roles = {c[lv][1] for c in padded}
        out.append((block_diag(mats), roles.pop() if len(roles) == 1 else "block_diag_fourier"))
    return out


def _dft_recursive(n: int, sign: int) -> list[tuple[SparseMatrix, str]]:
    if n <= 2:
        return [(SparseMatrix.from_dense(fourier_dense(model_dft(n, sign))), "block_diag_fourier")]
    plan = _dft_bottom_up(model_dft(n, sign), 2)
    sub = _dft_recursive(n // 2, sign)
    return [(plan.factors[0], "routing_scaled")] + _stack_levels([sub, sub]) + [(plan.factors[2], "permutation")]


def _cheb_recursive(rs, th, basis, L, q_model=None) -> list[tuple[SparseMatrix, str]]:
    if L == 1 or len(basis) == 1:
        return [(SparseMatrix.from_dense(cheb_matrix_theta(rs, list(basis), th)), "block_diag_fourier")]
    sp = split_node(rs, th, basis, L, q_model)
    kids = [_cheb_recursive(rs, t, b, L // 2) for t, b in zip(sp.child_thetas, sp.child_bases)]
    return [(sp.P, "permutation")] + _stack_levels(kids) + [(sp.T, "block_T"), (sp.B, "basis_change")]


def merge_permutations(factors: list[tuple[SparseMatrix, str]]) -> list[tuple[SparseMatrix, str]]:
    """Multiply adjacent permutation factors together and drop identities."""
    out: list[tuple[SparseMatrix, str]] = []
    for f, role in factors:
        if out and f.is_permutation() and out[-1][0].is_permutation():
            out[-1] = (out[-1][0] @ f, "permutation")
        else:
            out.append((f, role))
    kept = [(f, r) for f, r in out if not f.is_identity()]
    return kept or out[:1]


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def recursive_plan(model: SignalModel) -> FactorPlan:
    n = model.n
    if not _is_pow2(n):
        raise FactorizationError("recursive plans need n a power of two")
    if model.name == "dft":
        facs = _dft_recursive(n, model.params.get("sign", -1))
    elif model.name in ("a2", "c2"):
        q = (model_a2(2) if model.name == "a2" else model_c2(2)) if n > 1 else None
        facs = _cheb_recursive(model.rs, thetas(model), model.basis_labels, n, q)
    else:
        raise FactorizationError(f"no recursive plan for model {model.name!r}")
    facs = merge_permutations(facs)
    return FactorPlan(model.name, n, tuple(f for f, _ in facs), tuple(r for _, r in facs), {"method": "recursive"})


def nnz_ratio(plan: FactorPlan) -> float:
    N = plan.shape[0]
    return float(plan.nnz / (N * np.log2(N))) if N > 1 else 1.0


# appendix basis changes for n = 2m


@dataclass(frozen=True)
class Term:
    coef: float
    weight: tuple[int, int]
    outer: str  # "1", "X" = T_{m,0}, "Y" = T_{0,m}, "XY" = T_{m,m}, "0" = factor in the ideal


def _t(c, a, b, outer="1"):
    return Term(float(c), (a, b), outer)


def _a2_case(k: int, l: int, m: int) -> str:
    if k == 0 and l == 0:
        return "k=l=0"
    if l == 0:
        return "l=0"
    if k == 0:
        return "k=0"
    return "k+l<m" if k + l < m else ("k+l=m" if k + l == m else "k+l>m")


def _a2_formula(region: str, k: int, l: int, m: int, verbatim: bool) -> list[Term]:
    case = _a2_case(k, l, m)
    if region == "I":
        return [_t(1, k, l)]
    if region == "II":
        return {
            "k=l=0": lambda: [_t(1, 0, 0, "X")],
            "l=0": lambda: [_t(-2, m - k, k), _t(3, k, 0, "X")],
            "k=0": lambda: [_t(-0.5, m - l, 0), _t(1.5, 0, l, "X")],
            "k+l<m": lambda: [_t(-1, m - k, k + l), _t(-1, m - k - l, k), _t(3, k, l, "X")],
            "k+l=m": lambda: [_t(-1, 0, k), _t(0.5, 0, m - l), _t(-1.5, l, 0, "Y"), _t(3, k, l, "X")],
            "k+l>m": lambda: [_t(1, l, 2 * m - k - l), _t(-3, m - k, k + l - m, "Y"), _t(3, k, l, "X")],
        }[case]()
    if region == "III":
        if case == "k=0":
            # printed with +2 T_{l,m-l}; the evaluation check needs -2
            return [_t(2 if verbatim else -2, l, m - l), _t(3, 0, l, "Y")]
        if case == "k+l=m":
            # printed index T_{0,-m-l}; the consistent index is T_{0,m-l}
            return [_t(-0.5, l, 0), _t(-1.5, 0, (-m - l) if verbatim else (m - l), "X"), _t(3, k, l, "Y")]
        return {
            "k=l=0": lambda: [_t(1, 0, 0, "Y")],
            "l=0": lambda: [_t(-0.5, 0, m - k), _t(1.5, k, 0, "Y")],
            "k+l<m": lambda: [_t(-1, l, m - k - l), _t(-1, k + l, m - l), _t(3, k, l, "Y")],
            "k+l>m": lambda: [_t(1, 2 * m - k - l, k), _t(-3, k + l - m, m - l, "X"), _t(3, k, l, "Y")],
        }[case]()
    if region == "IV":
        return {
            "k=l=0": lambda: [_t(1, 0, 0, "XY")],
            "l=0": lambda: [_t(1, k, 0), _t(-3, m - k, k, "Y"), _t(3, k, 0, "XY")],
            "k=0": lambda: [_t(1, 0, l), _t(-3, l, m - l, "X"), _t(3, 0, l, "XY")],
            "k+l<m": lambda: [
                _t(2, k, l),
                _t(-1, m - l, m - k),
                _t(-3, m - k, k + l, "Y"),
                _t(-3, k + l, m - l, "X"),
                _t(6, k, l, "XY"),
            ],
            "k+l=m": lambda: [
                _t(1, k, l),
                _t(-1.5, 0, k, "Y"),
                _t(-1.5, l, 0, "0"),
                _t(-1.5, l, 0, "X"),
                _t(-1.5, 0, m - l, "0"),
                _t(6, k, l, "XY"),
            ],
            "k+l>m": lambda: [
                _t(-1, m - l, m - k),
                _t(2, k, l),
                _t(-3, m - k, k + l - m, "X"),
                _t(3, l, 2 * m - k - l, "Y"),
                _t(-3, m - k, k + l - m, "0"),
                _t(3, 2 * m - k - l, k, "X"),
                _t(-3, k + l - m, m - l, "0"),
                _t(-3, k + l - m, m - l, "Y"),
                _t(6, k, l, "XY"),
            ],
        }[case]()
    raise ValueError(region)


def _c2_case(k: int, l: int, m: int) -> str:
    if k == 0 and l == 0:
        return "k=l=0"
    if l == 0:
        return "l=0"
    if k == 0:
        return "k=0,2l" + ("<" if 2 * l < m else "=" if 2 * l == m else ">") + "m"
    return "k+2l" + ("<" if k + 2 * l < m else "=" if k + 2 * l == m else ">") + "m"


# cases whose printed right-hand side fails the evaluation check, with the
# replacement that passes for every m tested
C2_ERRATA = {
    ("II", "k=0,2l<m"): lambda k, l, m: [_t(2, 0, l, "X"), _t(-1, m - 2 * l, l)],
    ("II", "k=0,2l=m"): lambda k, l, m: [_t(2, 0, l, "X"), _t(-1, 0, l)],
    ("II", "k=0,2l>m"): lambda k, l, m: [_t(2, 0, l, "X"), _t(-1, 2 * l - m, m - l)],
    ("III", "k=0,2l<m"): lambda k, l, m: [_t(4, 0, l, "Y"), _t(-2, 2 * l, m - l), _t(-1, 0, m - l)],
    ("III", "k=0,2l=m"): lambda k, l, m: [_t(4, 0, l, "Y"), _t(-4, 0, l, "X"), _t(1, 0, l)],
    ("III", "k=0,2l>m"): lambda k, l, m: [
        _t(4, 0, l, "Y"),
        _t(1, 0, m - l),
        _t(2, 0, l),
        _t(2, 2 * m - 2 * l, l),
        _t(-8, 2 * l - m, m - l, "X"),
    ],
    ("III", "k+2l=m"): lambda k, l, m: [
        _t(4, k, l, "Y"),
        _t(-2, 0, l, "X"),
        _t(-2, 0, k + l, "X"),
        _t(1, k, l),
    ],
}
A2_ERRATA = {("III", "k=0"), ("III", "k+l=m")}


def _c2_formula(region: str, k: int, l: int, m: int, verbatim: bool) -> list[Term]:
    case = _c2_case(k, l, m)
    if region == "I":
        return [_t(1, k, l)]
    if not verbatim and (region, case) in C2_ERRATA:
        return C2_ERRATA[(region, case)](k, l, m)
    if region == "II":
        return {
            "k=l=0": lambda: [_t(1, 0, 0, "X")],
            "l=0": lambda: [_t(-2, m - k, k), _t(-1, m - k, 0), _t(4, k, 0, "X")],
            "k=0,2l<m": lambda: [_t(-0.5, m - 2 * l, l), _t(2, 0, l, "X")],
            "k=0,2l=m": lambda: [_t(-0.5, 0, l), _t(2, 0, l, "X")],
            "k=0,2l>m": lambda: [_t(-0.5, 2 * l - m, m - l), _t(2, 0, l, "X")],
            "k+2l<m": lambda: [
                _t(-1, m - k, k + l),
                _t(-1, m - k - 2 * l, l),
                _t(-1, m - k - 2 * l, k + l),
                _t(4, k, l, "X"),
            ],
            "k+2l=m": lambda: [_t(-1, 0, l), _t(-1, 0, k + l), _t(-1, 2 * l, k + l), _t(4, k, l, "X")],
            "k+2l>m": lambda: [
                _t(-1, k + 2 * l - m, m - l),
                _t(-1, k + 2 * l - m, m - k - l),
                _t(-1, m - k, k + l),
                _t(4, k, l, "X"),
            ],
        }[case]()
    if region == "III":
        return {
            "k=l=0": lambda: [_t(1, 0, 0, "Y")],
            "l=0": lambda: [_t(-1, k, m - k), _t(2, k, 0, "Y")],
            "k=0,2l<m": lambda: [_t(-1, 0, m - l), _t(-1, 2 * l, m - l), _t(4, 0, l, "Y")],
            "k=0,2l=m": lambda: [_t(-0.5, 0, l), _t(-1, 0, l, "X"), _t(4, 0, l, "Y")],
            "k=0,2l>m": lambda: [
                _t(1, 0, l),
                _t(1, 2 * m - 2 * l, l),
                _t(-4, 2 * l - m, m - l, "X"),
                _t(4, 0, l, "Y"),
            ],
            "k+2l<m": lambda: [
                _t(-1, k, m - k - l),
                _t(-1, k + 2 * l, m - l),
                _t(-1, k + 2 * l, m - k - l),
                _t(4, k, l, "Y"),
            ],
            "k+2l=m": lambda: [_t(-2, 0, l, "X"), _t(-2, 0, m - l, "X"), _t(4, k, l, "Y")],
            "k+2l>m": lambda: [
                _t(1, k, m - k - l),
                _t(2, k, l),
                _t(1, 2 * m - k - 2 * l, k + l),
                _t(-4, k + 2 * l - m, m - l, "X"),
                _t(1, 2 * m - k - 2 * l, l),
                _t(-4, k + 2 * l - m, m - k - l, "X"),
                _t(4, k, l, "Y"),
            ],
        }[case]()
    raise ValueError(region)


@dataclass(frozen=True)
class AppendixBasis:
    kind: str
    m: int
    old: tuple[tuple[int, int], ...]
    new: tuple[tuple[tuple[int, int], str], ...]  # (inner weight, outer factor)
    rows: tuple[tuple[str, str, tuple[int, int], tuple[Term, ...]], ...]  # region, case, old weight, terms


OUTER = {"1": (0, 0), "X": (1, 0), "Y": (0, 1), "XY": (1, 1)}


def appendix_basis(kind: str, m: int, verbatim: bool = False) -> AppendixBasis:
    if m < 1:
        raise ValueError("m must be >= 1")
    kind = kind.upper()
    rs = root_system(kind)
    n = 2 * m
    rows = []
    if kind == "A2":
        old = tuple(model_a2(n).basis_labels)
        new = tuple((w, o) for o in ("1", "Y", "X", "XY") for w in nested_basis(rs, m))
        for a, b in old:
            region = {(0, 0): "I", (1, 0): "II", (0, 1): "III", (1, 1): "IV"}[(a >= m, b >= m)]
            k, l = a % m, b % m
            rows.append((region, _a2_case(k, l, m), (a, b), tuple(_a2_formula(region, k, l, m, verbatim))))
    elif kind == "C2":
        from .models import c2_basis

        old = tuple(c2_basis(n))
        small = [w for w in nested_basis(rs, m) if sum(w) < m]
        new = tuple([(w, "1") for w in nested_basis(rs, m)] + [(w, "X") for w in small] + [(w, "Y") for w in small])
        for a, b in old:
            if a < m and b < m:
                region, k, l = "I", a, b
            elif a >= m:
                region, k, l = "II", a - m, b
            else:
                region, k, l = "III", a, b - m
            rows.append((region, _c2_case(k, l, m), (a, b), tuple(_c2_formula(region, k, l, m, verbatim))))
    else:
        raise ValueError("appendix basis changes exist for A2 and C2")
    return AppendixBasis(kind, m, old, new, tuple(rows))


def _appendix_matrix(ab: AppendixBasis) -> tuple[SparseMatrix, list[tuple[str, str]]]:
    rs = root_system(ab.kind)
    index = {key: i for i, key in enumerate(ab.new)}
    triples, unmapped = [], []
    for col, (region, case, _, terms) in enumerate(ab.rows):
        for t in terms:
            if t.outer == "0":
                continue  # multiple of T_{2m,0} or T_{0,2m}, zero on the variety
            w = normalize_dominant(rs, t.weight)
            key = (w, t.outer)
            if key not in index:
                unmapped.append((region, case))
                continue
            triples.append((index[key], col, t.coef))
    return SparseMatrix.from_triples((len(ab.new), len(ab.old)), triples), unmapped


def _induction_eval(ab: AppendixBasis, model: SignalModel) -> np.ndarray:
    th = thetas(model)
    rs = model.rs
    m = ab.m
    inner = cheb_matrix_theta(rs, [w for w, _ in ab.new], th)
    outer = cheb_matrix_theta(rs, [(OUTER[o][0] * m, OUTER[o][1] * m) for _, o in ab.new], th)
    return inner * outer


def basischange(kind: str, m: int, verbatim: bool = False) -> SparseMatrix:
    """Matrix B with F_old = E_new B, columns indexed by the old basis."""
    B, unmapped = _appendix_matrix(appendix_basis(kind, m, verbatim))
    if unmapped and not verbatim:
        raise FactorizationError(f"appendix terms outside the new basis: {sorted(set(unmapped))}")
    return B


def basischange_a2(m: int, verbatim: bool = False) -> SparseMatrix:
    return basischange("A2", m, verbatim)


def basischange_c2(m: int, verbatim: bool = False) -> SparseMatrix:
    return basischange("C2", m, verbatim)


def appendix_check(kind: str, m: int, verbatim: bool = False, tol: float = 1e-9) -> dict:
    """Evaluate both sides of every case at all points of the n = 2m model.

    Returns max error per (region, case) and the labels that fail.
    """
    ab = appendix_basis(kind, m, verbatim)
    model = model_a2(2 * m) if ab.kind == "A2" else model_c2(2 * m)
    B, unmapped = _appendix_matrix(ab)
    E = _induction_eval(ab, model)
    F = fourier_dense(model)
    err = np.max(np.abs(F - E @ B.to_dense()), axis=0)
    per_case: dict[tuple[str, str], float] = {}
    for col, (region, case, _, _) in enumerate(ab.rows):
        key = (region, case)
        per_case[key] = max(per_case.get(key, 0.0), float(err[col]))
    for key in unmapped:
        per_case[key] = float("inf")
    failing = sorted(k for k, e in per_case.items() if not e < tol)
    return {"errors": per_case, "failing": failing, "max_error": max(per_case.values(), default=0.0)}
