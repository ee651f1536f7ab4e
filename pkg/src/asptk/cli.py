"""asptk command line.

    asptk zeros  --model c2 --n 3
    asptk matrix --model a2 --n 2 --out F.json
    asptk factor --model dft --n 4 --method bottom-up
    asptk ortho  --model c2 --n 4
    asptk bench  --model dft --n 1024

Exit codes: 0 ok, 2 invalid input or unsupported request, 3 verification
failed. ASPTK_THREADS caps the worker pool used to build benchmark plans.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import jsonio
from .fastfactor import (
    FactorizationError,
    factor_bottom_up,
    factor_top_down,
    recursive_plan,
    verify_plan,
)
from .models import MODELS, build_model, fourier_dense, model_to_json
from .ortho import OrthogonalityError, UnsupportedModelError, orthogonalize

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 2, 3
METHODS = ("bottom-up", "top-down", "recursive")
SUPPORTED = {
    "bottom-up": {"dft", "hex", "a2"},
    "top-down": {"dft", "a2", "c2"},
    "recursive": {"dft", "a2", "c2"},
}
DEFAULT_METHOD = {"dft": "bottom-up", "hex": "bottom-up", "a2": "top-down", "c2": "top-down"}


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str
    n: int
    method: str | None = None
    tol: float = 1e-9
    out: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValidationError(f"unknown model {self.model!r}")
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        if self.model == "hex" and (self.n < 4 or self.n & (self.n - 1)):
            raise ValidationError("hex needs n a power of two >= 4")
        if self.method is not None and self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if self.method == "recursive" and self.n & (self.n - 1):
            raise ValidationError("recursive plans need n a power of two")
        if not self.tol > 0:
            raise ValidationError("tol must be positive")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ASPTK_THREADS", "1")))
    except ValueError:
        raise ValidationError("ASPTK_THREADS must be an integer") from None


def _emit(obj, out: str | None) -> None:
    if out:
        jsonio.dump(obj, out)
    else:
        sys.stdout.write(jsonio.dumps(obj) + "\n")


def make_plan(model, method: str):
    if model.name not in SUPPORTED[method]:
        raise ValidationError(f"method {method!r} is not available for model {model.name!r}")
    if method == "bottom-up":
        return factor_bottom_up(model)
    if method == "top-down":
        return factor_top_down(model)
    return recursive_plan(model)


def cmd_zeros(cfg: RunConfig) -> int:
    m = build_model(cfg.model, cfg.n)
    data = model_to_json(m)
    _emit({"model": m.name, "n": m.n, "count": m.size, "points": [p["x"] for p in data["variety"]], "labels": [p["label"] for p in data["variety"]]}, cfg.out)
    return EXIT_OK


def cmd_matrix(cfg: RunConfig) -> int:
    m = build_model(cfg.model, cfg.n)
    F = fourier_dense(m)
    _emit({"model": m.name, "n": m.n, "shape": list(F.shape), "rows": [[jsonio.cplx(z) for z in row] for row in F]}, cfg.out)
    return EXIT_OK


def cmd_factor(cfg: RunConfig) -> int:
    m = build_model(cfg.model, cfg.n)
    method = cfg.method or DEFAULT_METHOD.get(m.name)
    if method is None:
        raise ValidationError(f"no factorization available for model {m.name!r}")
    plan = make_plan(m, method)
    rep = verify_plan(plan, fourier_dense(m))
    report = dict(rep.as_dict(), model=m.name, n=m.n, method=method, tol=cfg.tol, ok=rep.ok(cfg.tol))
    if "block_dims" in plan.meta:
        report["block_dims"] = list(plan.meta["block_dims"])
    if cfg.out:
        jsonio.dump(dict(plan.to_json(), report=report), cfg.out)
    _emit(report, None)
    return EXIT_OK if rep.ok(cfg.tol) else EXIT_VERIFY


def cmd_ortho(cfg: RunConfig) -> int:
    if cfg.model != "c2":
        raise ValidationError(f"unsupported: orthogonalization is only defined for c2, not {cfg.model}")
    try:
        res = orthogonalize(cfg.n, tol=float("inf"))
    except OrthogonalityError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VERIFY
    ok = res.residual < cfg.tol
    _emit({"model": "c2", "n": cfg.n, "residual": res.residual, "ok": ok, "orientation": res.orientation, "D": res.D.tolist()}, cfg.out)
    return EXIT_OK if ok else EXIT_VERIFY


def _time_ns(fn, v, reps: int) -> float:
    fn(v)
    best = float("inf")
    for _ in range(reps):
        t = time.perf_counter_ns()
        fn(v)
        best = min(best, time.perf_counter_ns() - t)
    return best


def bench_sizes(model: str, n: int) -> list[int]:
    lo = 8 if model == "dft" and n >= 8 else 1
    out, k = [], lo
    while k <= n:
        out.append(k)
        k *= 2
    return out or [n]


def cmd_bench(cfg: RunConfig, reps: int = 5) -> int:
    method = cfg.method or "recursive"
    sizes = bench_sizes(cfg.model, cfg.n)
    models = [build_model(cfg.model, k) for k in sizes]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        plans = list(pool.map(lambda m: make_plan(m, method), models))
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for m, plan in zip(models, plans):
        F = fourier_dense(m)
        rep = verify_plan(plan, F)
        if not rep.ok(cfg.tol):
            sys.stderr.write(f"error: {m.name}({m.n}) plan error {rep.rel_error:.3e}\n")
            return EXIT_VERIFY
        v = rng.standard_normal(F.shape[1]) + 1j * rng.standard_normal(F.shape[1])
        rows.append(
            {
                "n": m.n,
                "points": m.size,
                "dense_apply_ns": _time_ns(lambda x: F @ x, v, reps),
                "plan_apply_ns": _time_ns(plan.apply, v, reps),
                "plan_nnz": rep.nnz_total,
                "nnz_ratio": rep.naive_nnz / rep.nnz_total,
            }
        )
    _emit({"model": cfg.model, "method": method, "rows": rows}, cfg.out)
    return EXIT_OK


COMMANDS = {"zeros": cmd_zeros, "matrix": cmd_matrix, "factor": cmd_factor, "ortho": cmd_ortho, "bench": cmd_bench}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asptk", description="Fourier matrices and fast factorizations for polynomial signal models")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--model", required=True, choices=sorted(MODELS))
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--method", choices=METHODS)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--out")
    ap.add_argument("--seed", type=int, default=0)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = RunConfig(args.command, args.model, args.n, args.method, args.tol, args.out, args.seed)
        return COMMANDS[cfg.command](cfg)
    except (ValidationError, UnsupportedModelError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except FactorizationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VERIFY
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
