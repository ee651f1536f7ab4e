"""Acceptance checks. Each test prints one PASS/FAIL line and asserts.

Run standalone with ``python3 tests/test_acceptance.py`` for the summary only.
"""

from __future__ import annotations

import sys
import time
import timeit

import numpy as np
import pytest

from asptk.chebyshev import cheb_expand, dominant_weights, expansion_error
from asptk.fastfactor import (
    appendix_check,
    factor_bottom_up,
    factor_top_down,
    nnz_ratio,
    recursive_plan,
    verify_plan,
)
from asptk.models import fourier_dense, generator_residuals, model_a2, model_c2, model_dft, model_hex
from asptk.ortho import cd_context, cd_kernel, cd_left, orthogonalize
from asptk.weyl import coords, random_fundamental_points, root_system

I = 1j
DFT4 = np.array([[1, 1, 1, 1], [1, -I, -1, I], [1, -1, 1, -1], [1, I, -1, -I]])
BOTTOM_UP = [
    np.array([[1, 0, 1, 0], [0, 1, 0, -I], [1, 0, -1, 0], [0, 1, 0, I]]),
    np.array([[1, 1, 0, 0], [1, -1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1]]),
    np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
]
TOP_DOWN = [
    np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]]),
    np.array([[1, 1, 0, 0], [1, -1, 0, 0], [0, 0, 1, I], [0, 0, 1, -I]]),
    np.array([[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, -1, 0], [0, 1, 0, -1]]),
]


def report(num: int, title: str, ok: bool, detail: str, capsys=None) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} ({detail})"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)


def trend_violations(seq) -> int:
    return sum(1 for a, b in zip(seq, seq[1:]) if b > a + 1e-12)


# each check returns (ok, detail)


def check_dft4_goldens():
    def build():
        m = model_dft(4)
        return factor_bottom_up(m), factor_top_down(m)

    bu, td = build()
    exact = all(np.array_equal(f.to_dense(), g) for f, g in zip(bu.factors, BOTTOM_UP))
    exact &= all(np.array_equal(f.to_dense(), g) for f, g in zip(td.factors, TOP_DOWN))
    exact &= len(bu.factors) == 3 and len(td.factors) == 3
    err = max(np.abs(p.product() - DFT4).max() for p in (bu, td))
    exact &= np.array_equal(fourier_dense(model_dft(4)), DFT4)
    # warm best of 5, each repetition builds both plans and multiplies out
    runtime = min(timeit.repeat(lambda: [p.product() for p in build()], number=1, repeat=5))
    ok = bool(exact and err == 0 and runtime < 1e-3)
    return ok, f"entries exact={bool(exact)}, product error={err}, runtime={runtime * 1e3:.3f} ms"


def check_chebyshev_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst, count = 0.0, 0
    for kind in ("A2", "C2"):
        rs = root_system(kind)
        th = random_fundamental_points(rs, 20, rng)
        for lam in dominant_weights(rs, 12):
            worst = max(worst, expansion_error(rs, lam, th))
            count += 1
    a2 = dict(cheb_expand(root_system("A2"), (1, 1)).terms)
    c2 = dict(cheb_expand(root_system("C2"), (1, 1)).terms)
    start_ok = a2 == {(1, 1): 1.5, (0, 0): -0.5} and c2 == {(1, 1): 2.0, (1, 0): -1.0}
    runtime = time.perf_counter() - t0
    ok = bool(worst < 1e-10 and start_ok and runtime < 5)
    return ok, f"{count} weights, max error={worst:.2e}, T_11 exact={start_ok}, runtime={runtime:.2f} s"


def check_variety_counts():
    t0 = time.perf_counter()
    counts_ok, worst = True, 0.0
    for n in range(1, 17):
        m = model_a2(n)
        counts_ok &= m.size == n * n
        worst = max(worst, float(generator_residuals(m).max()))
    for n in range(1, 33):
        m = model_c2(n)
        counts_ok &= m.size == n * (n + 1) // 2
        worst = max(worst, float(generator_residuals(m).max()))
    runtime = time.perf_counter() - t0
    ok = bool(counts_ok and worst < 1e-9 and runtime < 5)
    return ok, f"counts ok={bool(counts_ok)}, max residual={worst:.2e}, runtime={runtime:.2f} s"


def check_factorizations():
    t0 = time.perf_counter()
    worst, dims_ok = 0.0, True
    for n in (2, 4, 8):
        m = model_a2(n)
        F = fourier_dense(m)
        for build in (factor_bottom_up, factor_top_down):
            worst = max(worst, verify_plan(build(m), F).rel_error)
    for n in (2, 4, 8, 16):
        m = model_c2(n)
        plan = factor_top_down(m)
        worst = max(worst, verify_plan(plan, fourier_dense(m)).rel_error)
        k = n // 2
        dims_ok &= list(plan.meta["block_dims"]) == [k * (k + 1) // 2, k * (k + 1) // 2, k * k]
    app_err, failing = 0.0, []
    for kind in ("A2", "C2"):
        for k in range(1, 9):
            r = appendix_check(kind, k, tol=1e-9)
            app_err = max(app_err, r["max_error"])
            failing += [(kind, k, c) for c in r["failing"]]
    runtime = time.perf_counter() - t0
    ok = bool(worst < 1e-9 and dims_ok and not failing and app_err < 1e-9 and runtime < 30)
    return ok, (
        f"max rel error={worst:.2e}, C2 block dims ok={bool(dims_ok)}, "
        f"appendix max error={app_err:.2e} failing={failing}, runtime={runtime:.2f} s"
    )


def check_complexity():
    t0 = time.perf_counter()
    a2 = [nnz_ratio(recursive_plan(model_a2(n))) for n in (4, 8, 16)]
    dft = [nnz_ratio(recursive_plan(model_dft(n))) for n in (8, 16, 32, 64, 128, 256, 512, 1024)]
    runtime = time.perf_counter() - t0
    va, vd = trend_violations(a2), trend_violations(dft)
    bounded = max(a2 + dft) < 32
    ok = bool(bounded and va <= 1 and vd <= 1 and runtime < 60)
    return ok, (
        f"A2 ratios={[round(r, 3) for r in a2]} violations={va}, "
        f"DFT ratios={[round(r, 3) for r in dft]} violations={vd}, runtime={runtime:.2f} s"
    )


def check_christoffel_darboux():
    t0 = time.perf_counter()
    rs = root_system("C2")
    rng = np.random.default_rng(6)
    worst_cd = worst_i = 0.0
    for n in range(9):
        ctx = cd_context(n)
        pts = [coords(rs, c).real for c in random_fundamental_points(rs, 100, rng)]
        for x, y in zip(pts[::2], pts[1::2]):
            left = cd_left(ctx, x, y)
            k1, k2 = cd_kernel(ctx, x, y, i=1), cd_kernel(ctx, x, y, i=2)
            scale = max(abs(left), 1.0)
            worst_cd = max(worst_cd, abs(left - k1) / scale)
            worst_i = max(worst_i, abs(k1 - k2) / scale)
    runtime = time.perf_counter() - t0
    ok = bool(worst_cd < 1e-9 and worst_i < 1e-9 and runtime < 10)
    return ok, f"max rel gap={worst_cd:.2e}, i-independence={worst_i:.2e}, runtime={runtime:.2f} s"


def check_orthogonalization():
    t0 = time.perf_counter()
    res = [orthogonalize(n, tol=np.inf).residual for n in range(1, 17)]
    runtime = time.perf_counter() - t0
    ok = bool(max(res) < 1e-9 and runtime < 10)
    return ok, f"max residual={max(res):.2e} over n=1..16, runtime={runtime:.2f} s"


def check_hexagonal():
    t0 = time.perf_counter()
    unit_gap = plan_err = 0.0
    routing = 0
    for N in (4, 8):
        m = model_hex(N)
        F = fourier_dense(m)
        G = F.conj().T @ F
        c = G[0, 0].real
        unit_gap = max(unit_gap, float(np.abs(G / c - np.eye(len(G))).max()))
        plan = factor_bottom_up(m)
        plan_err = max(plan_err, verify_plan(plan, F).rel_error)
        routing = max(routing, *(f.max_row_nnz() for f, r in zip(plan.factors, plan.roles) if r == "routing_scaled"))
    runtime = time.perf_counter() - t0
    ok = bool(unit_gap < 1e-9 and plan_err < 1e-9 and 0 < routing <= 4 and runtime < 20)
    return ok, f"F^H F gap={unit_gap:.2e}, plan error={plan_err:.2e}, routing nnz/row={routing}, runtime={runtime:.2f} s"


CRITERIA = [
    (1, "DFT4 golden factorizations", check_dft4_goldens),
    (2, "Chebyshev consistency", check_chebyshev_consistency),
    (3, "variety counts", check_variety_counts),
    (4, "factorization correctness", check_factorizations),
    (5, "recursive plan sparsity", check_complexity),
    (6, "Christoffel-Darboux kernel", check_christoffel_darboux),
    (7, "orthogonal transform", check_orthogonalization),
    (8, "hexagonal model", check_hexagonal),
]


@pytest.mark.parametrize("num,title,check", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_acceptance(num, title, check, capsys):
    ok, detail = check()
    report(num, title, ok, detail, capsys)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for num, title, check in CRITERIA:
        ok, detail = check()
        report(num, title, ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
