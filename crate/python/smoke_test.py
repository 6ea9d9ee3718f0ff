#!/usr/bin/env python3
"""Smoke test for the bsubgrad extension module.

Builds the cdylib if needed, stages it under an importable name, then runs a
small certified solve through every exposed entry point.

Usage: python3 python/smoke_test.py
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def stage_module(tmp: Path) -> None:
    lib = ROOT / "target" / "debug" / "libbsubgrad.so"
    if not lib.exists():
        subprocess.run(
            ["cargo", "build", "-p", "bsubgrad-py"], cwd=ROOT, check=True
        )
    shutil.copy(lib, tmp / "bsubgrad.so")
    sys.path.insert(0, str(tmp))


def check(name: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    if not ok:
        sys.exit(1)


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        stage_module(Path(tmp))
        import bsubgrad

        check("import", True, f"version {bsubgrad.VERSION}")

        p1 = bsubgrad.example1(20, radius=10.0, gamma=0.5)
        check("example1", p1.mu == 1.0 and p1.dim == 20 and p1.optimum[1] == 0.0)
        x = [0.3] * 20
        g = p1.subgrad(x)
        norm = math.sqrt(sum(v * v for v in x))
        expected = norm + 2 * 0.5 * norm**2
        check("eval/subgrad", abs(p1.eval_f(x) - expected) < 1e-12 and len(g) == 20)

        res = bsubgrad.run(p1, oracle="exact", iters=5000, seed=7)
        b = res.bounds(lipschitz=p1.lipschitz_analytic)
        check(
            "run + bounds",
            res.gap <= b["bound_func_new"] * (1 + 1e-9)
            and b["bound_func_new"] <= b["bound_func_classical"] * (1 + 1e-12),
            f"gap {res.gap:.3e} <= bound {b['bound_func_new']:.3e}",
        )

        res2 = bsubgrad.run(p1, oracle="exact", iters=5000, seed=7)
        check("determinism", res.x_hat == res2.x_hat and res.aggregates == res2.aggregates)

        noisy = bsubgrad.run(p1, oracle="relative:0.5", iters=5000, seed=7)
        nb = bsubgrad.bounds_report(noisy.aggregates, noisy.iters, noisy.mu, oracle="relative:0.5")
        check(
            "inexact oracle",
            noisy.gap <= nb["bound_func_relative"] * (1 + 1e-9),
            f"gap {noisy.gap:.3e} <= bound {nb['bound_func_relative']:.3e}",
        )

        p2 = bsubgrad.example2(2, radius=10.0, anchors=[[0.0, 0.0], [2.0, 0.0]])
        cx, f_star = p2.optimum
        check("example2 optimum", max(abs(cx[0] - 1.0), abs(cx[1])) < 1e-9 and abs(f_star - 1.0) < 1e-9)

        center, value = bsubgrad.solve_meb([[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]], 10.0)
        check("solve_meb", abs(center[0] - 1.0) < 1e-9 and abs(value - 1.0) < 1e-9)

        worst = bsubgrad.validate_relative_strong_convexity(p1, samples=500, seed=3)
        check("strong convexity", worst <= 1e-8, f"worst violation {worst:.3e}")

        v = bsubgrad.bregman("euclidean:10", [1.0, 2.0], [0.0, 0.0])
        check("bregman", abs(v - 2.5) < 1e-12)
        stepped = bsubgrad.mirror_step("entropy:2", [0.5, 0.5], [math.log(0.5), 0.0], 1.0)
        check("mirror_step", abs(stepped[0] - 2 / 3) < 1e-12 and abs(stepped[1] - 1 / 3) < 1e-12)

        n = bsubgrad.iterations_for_epsilon(1.0, 2.0, 0.1)
        check("iterations_for_epsilon", n == 79)

        print("smoke test passed")


if __name__ == "__main__":
    main()
