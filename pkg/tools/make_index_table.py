#!/usr/bin/env python3
"""Compute the bundled normalized index table for exponential rewards.

For each discount d the script runs one backward value-iteration sweep over
pseudo-observation counts (deep horizon down to n = 2) for an arm with unit
pseudo-sum, carrying the retirement-option value function on a log-grid of
the normalized retirement rate. The expectation over the heavy-tailed
posterior-predictive outcome is taken with Gauss-Laguerre quadrature in the
log-state increment, which is exponentially distributed with rate n. At
each tabulated n the indifference rate rho* is read off and refined by
bisection; the normalized index is v(n, d, 1) = n * rho*.

This tool is deliberately a different discretization from the package's
desk-scale validation oracle (equal-probability strata on the outcome), so
the two act as independent cross-checks. Numerical anchors: v -> n/(n-1)
as d -> 0, v -> 1 as n -> infinity, monotone in n and d.

Writes src/expgi/data/gi_exponential_table.csv (6 decimal places).
"""

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np
from numba import njit
from numpy.polynomial.laguerre import laggauss

DISCOUNTS = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.995)

TABULATED_N = (
    list(range(2, 51))
    + list(range(52, 81, 2))
    + list(range(85, 101, 5))
    + list(range(110, 201, 10))
    + list(range(220, 301, 20))
    + list(range(350, 501, 50))
)


@njit(cache=True)
def _sweep(d, n_top, tq, wq, xgrid, dx, want, out_v):
    npts = xgrid.shape[0]
    nq = tq.shape[0]
    inv1md = 1.0 / (1.0 - d)
    rho = np.exp(xgrid)
    m_top = 1.0 / (n_top - 1.0)
    phi = np.maximum(rho, m_top) * inv1md
    cgrid = np.empty(npts)
    for n in range(n_top - 1, 1, -1):
        m_next = 1.0 / n  # predictive mean per unit sum at pseudo-count n + 1
        cgrid[:] = 0.0
        for q in range(nq):
            u = tq[q] / n
            eu = math.exp(u)
            off = u / dx
            i0 = int(off)
            fr = off - i0
            for i in range(npts):
                jj = i - i0
                if jj >= 1:
                    pn = (1.0 - fr) * phi[jj] + fr * phi[jj - 1]
                elif jj == 0:
                    pn = (1.0 - fr) * phi[0] + fr * (m_next * inv1md)
                else:
                    pn = m_next * inv1md  # below grid: retirement never binds
                cgrid[i] += wq[q] * ((eu - 1.0) + d * eu * pn)
        if want[n]:
            lo_i = -1
            for i in range(npts - 1):
                if (cgrid[i] - rho[i] * inv1md) > 0.0 and (
                    cgrid[i + 1] - rho[i + 1] * inv1md
                ) <= 0.0:
                    lo_i = i
                    break
            if lo_i < 0:
                out_v[n] = -1.0
            else:
                lo = rho[lo_i]
                hi = rho[lo_i + 1]
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    xm = math.log(mid)
                    c = 0.0
                    for q in range(nq):
                        u = tq[q] / n
                        eu = math.exp(u)
                        pos = (xm - u - xgrid[0]) / dx
                        jj = int(math.floor(pos))
                        if jj >= npts - 1:
                            pn = mid * math.exp(-u) * inv1md
                        elif jj < 0:
                            pn = m_next * inv1md
                        else:
                            fr2 = pos - jj
                            pn = (1.0 - fr2) * phi[jj] + fr2 * phi[jj + 1]
                        c += wq[q] * ((eu - 1.0) + d * eu * pn)
                    if c - mid * inv1md > 0.0:
                        lo = mid
                    else:
                        hi = mid
                out_v[n] = n * 0.5 * (lo + hi)
        for i in range(npts):
            lin = rho[i] * inv1md
            phi[i] = lin if lin > cgrid[i] else cgrid[i]


def compute_discount(d, n_values, npts=12288, nq=128, trunc=1e-12):
    t_extra = max(int(math.ceil(math.log(trunc) / math.log(d))), 8)
    n_top = max(n_values) + t_extra
    tq, wq = laggauss(nq)
    keep = wq > 1e-290
    tq, wq = np.ascontiguousarray(tq[keep]), np.ascontiguousarray(wq[keep])
    xgrid = np.linspace(math.log(1e-6), math.log(1e3), npts)
    dx = xgrid[1] - xgrid[0]
    want = np.zeros(n_top + 1, dtype=np.bool_)
    for n in n_values:
        want[n] = True
    out = np.zeros(n_top + 1)
    _sweep(d, n_top, tq, wq, xgrid, dx, want, out)
    values = {}
    for n in n_values:
        if out[n] <= 0.0:
            raise RuntimeError(f"indifference rate not bracketed for d={d}, n={n}")
        values[n] = out[n]
    return values


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--out",
        default=str(
            Path(__file__).resolve().parent.parent
            / "src/expgi/data/gi_exponential_table.csv"
        ),
    )
    parser.add_argument("--npts", type=int, default=12288)
    parser.add_argument("--quad", type=int, default=128)
    parser.add_argument("--trunc", type=float, default=1e-12)
    args = parser.parse_args(argv)

    rows = []
    for d in DISCOUNTS:
        t0 = time.time()
        values = compute_discount(d, TABULATED_N, args.npts, args.quad, args.trunc)
        rounded = [round(values[n], 6) for n in TABULATED_N]
        # the curve is flat to <1e-6 at large n; clamp any rounding-scale
        # wiggle so the shipped file is exactly non-increasing
        for i, n in enumerate(TABULATED_N):
            if i > 0:
                if rounded[i] > rounded[i - 1] + 5e-6:
                    raise RuntimeError(
                        f"non-monotone beyond rounding noise at d={d}, n={n}: "
                        f"{rounded[i]} > {rounded[i - 1]}"
                    )
                rounded[i] = min(rounded[i], rounded[i - 1])
            if rounded[i] < 1.0:
                raise RuntimeError(f"index below 1 at d={d}, n={n}: {rounded[i]}")
        rows.append((d, rounded))
        print(
            f"d={d}: v(2)={rounded[0]:.6f} ... v(500)={rounded[-1]:.6f} "
            f"({time.time() - t0:.1f}s)",
            flush=True,
        )

    # cross-discount check: v non-decreasing in d at every n
    for i in range(1, len(rows)):
        for j, n in enumerate(TABULATED_N):
            if rows[i][1][j] < rows[i - 1][1][j]:
                raise RuntimeError(
                    f"v not monotone in d at n={n}: "
                    f"d={rows[i][0]} gives {rows[i][1][j]} < "
                    f"d={rows[i - 1][0]} gives {rows[i - 1][1][j]}"
                )

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("discount,n,value\n")
        for d, rounded in rows:
            for n, v in zip(TABULATED_N, rounded):
                fh.write(f"{d:g},{n},{v:.6f}\n")
    print(f"wrote {sum(len(r[1]) for r in rows)} rows to {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
