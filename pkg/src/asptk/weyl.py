"""Root systems A1, A2, C2 and their Weyl groups.

Weights are integer vectors over the fundamental weights. Points of the
angle variable theta are given in barycentric coweight coordinates c with
theta = sum_j c_j w_j^vee.

The dual pairing is <lam, theta> = lam^T G c where G_ij = <w_i, w_j^vee>.
For A2 and C2 in their standard realisation G is the inverse Cartan
matrix, not the identity. A1 uses the scaling under which T_n(cos 2 pi c)
= cos(2 pi n c), i.e. G = [[1]].
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

SLACK = 1e-12


@dataclass(frozen=True)
class FundamentalPoint:
    barycentric: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "barycentric", tuple(float(c) for c in self.barycentric))

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.barycentric)


@dataclass(frozen=True, eq=False)
class RootSystemData:
    kind: str
    rank: int
    simple_roots: np.ndarray  # rows, Euclidean
    simple_coroots: np.ndarray
    fundamental_weights: np.ndarray
    fundamental_coweights: np.ndarray
    cartan: np.ndarray  # A_ij = <alpha_i, alpha_j^vee>; row i = alpha_i in weight coordinates
    marks: tuple[int, ...]
    comarks: tuple[int, ...]
    mdeg_weights: tuple[int, ...]
    weyl_generators: tuple[np.ndarray, ...]
    pairing: np.ndarray  # G_ij = <w_i, w_j^vee>

    def __repr__(self):
        return f"RootSystemData({self.kind})"

    def __hash__(self):
        return hash(self.kind)

    def __eq__(self, other):
        return isinstance(other, RootSystemData) and other.kind == self.kind

    @cached_property
    def elements(self) -> tuple[np.ndarray, ...]:
        return tuple(weyl_elements(self))

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def theta_elements(self) -> tuple[np.ndarray, ...]:
        """Contragredient action on barycentric coordinates: c -> G^-1 S^T G c."""
        Ginv = np.linalg.inv(self.pairing)
        return tuple(Ginv @ S.T @ self.pairing for S in self.elements)

    @cached_property
    def coroot_lattice(self) -> np.ndarray:
        """Columns generate the translations q with <lam, q> integral for all lam."""
        return np.linalg.inv(self.pairing)


def _reflection_matrices(cartan: np.ndarray) -> tuple[np.ndarray, ...]:
    # s_i(lam) = lam - lam_i * alpha_i, alpha_i = row i of the Cartan matrix
    d = cartan.shape[0]
    gens = []
    for i in range(d):
        S = np.eye(d, dtype=int)
        S[:, i] -= cartan[i, :]
        gens.append(S)
    return tuple(gens)


def _build(kind: str, roots: np.ndarray, marks, comarks, mdeg_weights, pairing=None) -> RootSystemData:
    roots = np.asarray(roots, dtype=float)
    coroots = np.array([2 * a / (a @ a) for a in roots])
    cartan = np.rint(roots @ coroots.T).astype(int)
    # <w_i, alpha_j^vee> = delta_ij and <alpha_i, w_j^vee> = delta_ij
    weights = np.linalg.inv(coroots).T
    coweights = np.linalg.inv(roots).T
    if pairing is None:
        pairing = weights @ coweights.T
    return RootSystemData(
        kind=kind,
        rank=len(roots),
        simple_roots=roots,
        simple_coroots=coroots,
        fundamental_weights=weights,
        fundamental_coweights=coweights,
        cartan=cartan,
        marks=tuple(marks),
        comarks=tuple(comarks),
        mdeg_weights=tuple(mdeg_weights),
        weyl_generators=_reflection_matrices(cartan),
        pairing=np.asarray(pairing, dtype=float),
    )


@lru_cache(maxsize=None)
def root_system(kind: str) -> RootSystemData:
    kind = kind.upper()
    if kind == "A1":
        # theta scaled so that x = cos(2 pi c); F = [0, 1/2] via the mark 2
        return _build("A1", [[np.sqrt(2.0)]], (2,), (2,), (1,), pairing=[[1.0]])
    if kind == "A2":
        s = np.sqrt(2.0)
        roots = [[s, 0.0], [-s / 2, s * np.sqrt(3.0) / 2]]
        return _build("A2", roots, (1, 1), (1, 1), (1, 1))
    if kind == "C2":
        # alpha_1 short (|.|^2 = 2), alpha_2 long (|.|^2 = 4), angle 3 pi / 4
        roots = [[1.0, -1.0], [0.0, 2.0]]
        return _build("C2", roots, (2, 1), (1, 1), (1, 2))
    raise ValueError(f"unsupported root system {kind!r}")


def weyl_elements(rs: RootSystemData) -> list[np.ndarray]:
    """Breadth-first closure of the generators, starting at the identity."""
    d = rs.rank
    start = np.eye(d, dtype=int)
    seen = {start.tobytes()}
    out = [start]
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for s in rs.weyl_generators:
            h = s @ g
            key = h.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(h)
                queue.append(h)
    return out


def orbit(rs: RootSystemData, lam: Sequence[int]) -> list[tuple[int, ...]]:
    lam = np.asarray(lam, dtype=int)
    return [tuple(int(v) for v in w @ lam) for w in rs.elements]


def normalize_dominant(rs: RootSystemData, lam: Sequence[int]) -> tuple[int, ...]:
    lam = np.array(lam, dtype=int)
    # reflect while some coordinate is negative; terminates for finite W
    for _ in range(64):
        neg = np.flatnonzero(lam < 0)
        if neg.size == 0:
            return tuple(int(v) for v in lam)
        lam = rs.weyl_generators[neg[0]] @ lam
    raise RuntimeError("dominant normalisation did not terminate")


def in_fundamental_domain(rs: RootSystemData, c: Sequence[float], slack: float = SLACK) -> bool:
    c = np.asarray(c, dtype=float)
    return bool(np.all(c >= -slack) and np.dot(rs.marks, c) <= 1 + slack)


def pair(rs: RootSystemData, lam: Sequence[int], c: Sequence[float]) -> float:
    return float(np.asarray(lam, dtype=float) @ rs.pairing @ np.asarray(c, dtype=float))


def orbit_sum(rs: RootSystemData, lam: Sequence[int], c: Sequence[float]) -> complex:
    lam = np.asarray(lam, dtype=float)
    phases = np.array([(w @ lam) @ rs.pairing @ np.asarray(c, dtype=float) for w in rs.elements])
    return complex(np.mean(np.exp(2j * np.pi * phases)))


def coords(rs: RootSystemData, theta: FundamentalPoint | Sequence[float], check: bool = True) -> np.ndarray:
    c = theta.c if isinstance(theta, FundamentalPoint) else np.asarray(theta, dtype=float)
    if check and not in_fundamental_domain(rs, c):
        raise ValueError(f"theta {tuple(c)} lies outside the fundamental domain of {rs.kind}")
    if rs.kind == "A1":
        return np.array([np.cos(2 * np.pi * c[0]) + 0j])
    return np.array([orbit_sum(rs, np.eye(rs.rank, dtype=int)[k], c) for k in range(rs.rank)])


def random_fundamental_points(rs: RootSystemData, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples of F in barycentric coordinates."""
    d = rs.rank
    # uniform on the simplex {c >= 0, sum m_j c_j <= 1}
    e = rng.exponential(size=(count, d + 1))
    e /= e.sum(axis=1, keepdims=True)
    return e[:, :d] / np.asarray(rs.marks, dtype=float)
