#!/usr/bin/env python3
"""Fit the degree-9 tail polynomial used by the Black-Scholes kernel.

For x >= 0 the kernel evaluates

    1 - Phi(x) = phi(x) * P(t),   t = 1 / (1 + 0.2316419 x)

where P is a degree-9 polynomial in Bernstein form on [0, 1]. P approximates
the Mills ratio (1 - Phi(x)) / phi(x); least squares over x in [0, 12].
Prints the coefficients as a C++ initializer.
"""
import numpy as np
from scipy.special import comb, erfcx

P_CONST = 0.2316419
X_MAX = 12.0
DEGREE = 9


def bernstein(t):
    return np.stack([comb(DEGREE, k) * t**k * (1 - t) ** (DEGREE - k) for k in range(DEGREE + 1)], 1)


def main():
    t = np.linspace(1.0 / (1.0 + P_CONST * X_MAX), 1.0, 200001)
    x = (1.0 / t - 1.0) / P_CONST
    mills = np.sqrt(np.pi / 2.0) * erfcx(x / np.sqrt(2.0))
    coef, *_ = np.linalg.lstsq(bernstein(t), mills, rcond=None)
    err = np.abs(bernstein(t) @ coef - mills).max()
    print(f"// max |P(t) - mills ratio| = {err:.3e}")
    print("inline constexpr std::array<double, 10> kTailCoefficients = {")
    for c in coef:
        print(f"    {c:.17g},")
    print("};")


if __name__ == "__main__":
    main()
