#!/usr/bin/env python3
"""Fit degree-(5,4) rational coefficients to SiLU on [-3, 3].

Produces the initialization constants baked into akt.kan
(PAU_SILU_NUMERATOR / PAU_SILU_DENOMINATOR). Offline tool: the package
itself never imports scipy.

    python tools/fit_pau_init.py
"""

import numpy as np
from scipy.optimize import least_squares

M, N = 5, 4
GRID = np.linspace(-3.0, 3.0, 4001)


def silu(x):
    return x / (1.0 + np.exp(-x))


def rational(theta, x):
    num, den = theta[: M + 1], theta[M + 1 :]
    p = np.polynomial.polynomial.polyval(x, num)
    s = x * np.polynomial.polynomial.polyval(x, den)
    return p / (1.0 + np.abs(s))


def main():
    target = silu(GRID)
    # start from a plain degree-5 polynomial fit, mild denominator
    a0 = np.polynomial.polynomial.polyfit(GRID, target, M)
    theta0 = np.concatenate([a0, np.full(N, 0.1)])
    fit = least_squares(lambda t: rational(t, GRID) - target, theta0, method="lm")
    err = np.max(np.abs(rational(fit.x, GRID) - target))
    print(f"max |PAU - SiLU| on [-3,3]: {err:.3e}")
    print("PAU_SILU_NUMERATOR = (")
    for v in fit.x[: M + 1]:
        print(f"    {v!r},")
    print(")")
    print("PAU_SILU_DENOMINATOR = (")
    for v in fit.x[M + 1 :]:
        print(f"    {v!r},")
    print(")")


if __name__ == "__main__":
    main()
