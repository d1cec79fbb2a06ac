"""Gallery of the four filter families and their decomposition structure.

For each family this prints the support layout, verifies the
g_l(tau + jT) = g(tau) f_l(jT) decomposition pointwise, and shows the
N x M coefficient matrix F_bar (identity for the compactly supported
test functions, triangular for the exponential families). Also emits a
CSV of filter values suitable for plotting with any external tool.

Run:  python3 demos/02_filter_gallery.py
"""

import numpy as np

from ctsid import build_F_bar, decompose, eval_g, make_filter_bank
from ctsid.filters import FAMILIES
from ctsid.serialize import matrix_to_csv

np.set_printoptions(precision=4, suppress=True)

T, M, N = 0.1, 4, 4
RHO = {"poly_test": 10.0 / T**5, "bump_test": 2.0, "laguerre": 1.0, "lowpass": 1.0}

for family in FAMILIES:
    bank = make_filter_bank(family, RHO[family], T, M, N)
    print(f"\n=== {family} (rho = {RHO[family]:g}) ===")
    for ell in range(1, M + 1):
        lo = bank.breakpoints(ell)[0]
        hi = bank.breakpoints(ell)[-1]
        print(f"  g_{ell}: support [{lo:.1f}, {hi:.1f})")

    # decomposition check: g_l(tau + jT) = g(tau) f_l(jT)
    dec = decompose(bank)
    taus = np.linspace(0, T, 7, endpoint=False)
    worst = 0.0
    for ell in range(1, M + 1):
        for j in range(N):
            direct = eval_g(bank, ell, taus + j * T)
            product = dec.g(taus) * dec.f(ell, np.array([j * T]))[0]
            worst = max(worst, float(np.max(np.abs(direct - product))))
    print(f"  decomposition residual: {worst:.2e}")

    fb = build_F_bar(dec)
    print("  F_bar =")
    for row in fb:
        print("   ", row)

    grid = np.linspace(0.0, bank.horizon, 400, endpoint=False)
    cols = [grid] + [np.asarray(eval_g(bank, ell, grid)) for ell in range(1, M + 1)]
    path = f"filter_{family}.csv"
    matrix_to_csv(path, np.column_stack(cols))
    print(f"  wrote {path} (t, g_1..g_{M})")
