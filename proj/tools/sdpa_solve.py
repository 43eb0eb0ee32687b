#!/usr/bin/env python3
"""Solve an SDPA .dat-s problem with cvxpy and write a CSDP-style solution.

Usage: sdpa_solve.py problem.dat-s solution.sol

Exit status: 0 solved, 2 infeasible or unbounded, 1 on any other failure.
"""

import re
import sys

import numpy as np


def read_sdpa(path):
    with open(path) as f:
        lines = [ln for ln in f if not ln.lstrip().startswith(('"', '*'))]
    tok = re.sub(r"[,{}()]", " ", " ".join(lines)).split()
    pos = 0

    def take():
        nonlocal pos
        pos += 1
        return tok[pos - 1]

    m = int(take())
    nb = int(take())
    sizes = [int(take()) for _ in range(nb)]
    c = np.array([float(take()) for _ in range(m)])
    mats = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(m + 1)]
    while pos < len(tok):
        k, b, i, j = (int(take()) for _ in range(4))
        v = float(take())
        mats[k][b - 1][i - 1, j - 1] = v
        mats[k][b - 1][j - 1, i - 1] = v
    return c, sizes, mats


def main(argv):
    if len(argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    import cvxpy as cp

    c, sizes, mats = read_sdpa(argv[1])
    m = len(c)
    y = cp.Variable(m)
    cons = []
    slacks = []
    for b, s in enumerate(sizes):
        expr = -mats[0][b] + sum(y[i] * mats[i + 1][b] for i in range(m) if np.any(mats[i + 1][b]))
        if s > 0:
            sym = (expr + expr.T) / 2
            cons.append(sym >> 0)
            slacks.append(sym)
        else:
            diag = cp.diag(expr)
            cons.append(diag >= 0)
            slacks.append(diag)
    prob = cp.Problem(cp.Minimize(c @ y), cons)
    try:
        prob.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        prob.solve(solver=cp.SCS, eps=1e-9)
    print(f"status {prob.status} objective {prob.value}", file=sys.stderr)
    if prob.status in ("infeasible", "unbounded", "infeasible_inaccurate", "unbounded_inaccurate"):
        return 2
    if prob.status not in ("optimal", "optimal_inaccurate"):
        return 1

    with open(argv[2], "w") as f:
        f.write(" ".join(f"{v:.17g}" for v in y.value) + "\n")
        for mat, source in ((1, "slack"), (2, "dual")):
            for b, s in enumerate(sizes):
                if source == "slack":
                    val = slacks[b].value
                else:
                    val = cons[b].dual_value
                val = np.atleast_1d(np.asarray(val, dtype=float))
                n = abs(s)
                full = np.diag(val) if s < 0 else val.reshape(n, n)
                for i in range(n):
                    for j in range(i, n):
                        if i == j or full[i, j] != 0:
                            f.write(f"{mat} {b + 1} {i + 1} {j + 1} {full[i, j]:.17g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
