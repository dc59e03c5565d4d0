"""Pure-numpy implementations of the hot kernels.

Same signatures as the compiled ``_speedups`` module; selected at import
time by ``akt._kernels`` when the extension is unavailable or disabled.
All arrays are float64 and C-contiguous.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _poly_eval(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Horner evaluation of c[0] + c[1]*x + ... + c[-1]*x**(len-1)."""
    out = np.full_like(x, coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * x + c
    return out


def _poly_deriv_eval(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    n = len(coeffs)
    if n < 2:
        return np.zeros_like(x)
    dcoeffs = coeffs[1:] * np.arange(1, n)
    return _poly_eval(dcoeffs, x)


def bspline_basis(x: np.ndarray, knots: np.ndarray, degree: int) -> np.ndarray:
    """Cox-de Boor basis values for each entry of the flat array `x`.

    Returns shape (len(x), len(knots) - degree - 1). Callers clamp x into
    the grid's live interval first; partition of unity holds there.
    """
    xs = x[:, None]
    # level-0 indicators over knot spans; the final span is closed above so
    # the clamped upper boundary still activates a span
    b = ((xs >= knots[:-1]) & (xs < knots[1:])).astype(np.float64)
    b[:, -1] = np.where(xs[:, 0] >= knots[-2], 1.0, b[:, -1])
    for k in range(1, degree + 1):
        left = (xs - knots[: -k - 1]) / (knots[k:-1] - knots[: -k - 1])
        right = (knots[k + 1 :] - xs) / (knots[k + 1 :] - knots[1:-k])
        b = left * b[:, :-1] + right * b[:, 1:]
    return b


def bspline_basis_deriv(
    x: np.ndarray, knots: np.ndarray, degree: int
) -> tuple[np.ndarray, np.ndarray]:
    """Basis values and their derivatives w.r.t. x, shapes (n, n_basis)."""
    lower = bspline_basis(x, knots, degree - 1)
    k = degree
    left = lower[:, :-1] / (knots[k:-1] - knots[: -k - 1])
    right = lower[:, 1:] / (knots[k + 1 :] - knots[1:-k])
    deriv = k * (left - right)
    xs = x[:, None]
    basis = (xs - knots[: -k - 1]) / (knots[k:-1] - knots[: -k - 1]) * lower[:, :-1] + (
        knots[k + 1 :] - xs
    ) / (knots[k + 1 :] - knots[1:-k]) * lower[:, 1:]
    return basis, deriv


def rational_fwd(x: np.ndarray, num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """P(x) / (1 + |b1*x + ... + bn*x^n|) with P ascending coeffs num."""
    p = _poly_eval(num, x)
    s = x * _poly_eval(den, x)
    return p / (1.0 + np.abs(s))


def rational_bwd(
    x: np.ndarray, num: np.ndarray, den: np.ndarray, gout: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of sum(gout * rational_fwd(x)) w.r.t. (x, num, den)."""
    p = _poly_eval(num, x)
    s = x * _poly_eval(den, x)
    sgn = np.sign(s)
    q = 1.0 + np.abs(s)
    dp = _poly_deriv_eval(num, x)
    # d/dx of s = b1*x + ... + bn*x^n
    ds = _poly_eval(den * np.arange(1, len(den) + 1), x)
    inv_q = 1.0 / q
    gf = gout * inv_q
    gq = -gout * p * inv_q * inv_q
    gx = gf * dp + gq * sgn * ds
    # powers of x for the coefficient gradients
    m_hi = max(len(num) - 1, len(den))
    powers = np.empty((len(x), m_hi + 1))
    powers[:, 0] = 1.0
    for j in range(1, m_hi + 1):
        powers[:, j] = powers[:, j - 1] * x
    gnum = powers[:, : len(num)].T @ gf
    gden = powers[:, 1 : len(den) + 1].T @ (gq * sgn)
    return gx, gnum, gden


def lap_solve(cost: np.ndarray) -> np.ndarray:
    """Minimum-cost injection of rows into columns (rows <= cols).

    Shortest-augmenting-path algorithm with dual variables; exact for any
    finite cost matrix. Ties in the column scan break toward the lowest
    column index. Returns col index per row, shape (n_rows,).
    """
    n_rows, n_cols = cost.shape
    u = np.zeros(n_rows)
    v = np.zeros(n_cols)
    col4row = np.full(n_rows, -1, dtype=np.int64)
    row4col = np.full(n_cols, -1, dtype=np.int64)

    for cur_row in range(n_rows):
        shortest = np.full(n_cols, np.inf)
        path = np.full(n_cols, -1, dtype=np.int64)
        done_cols = np.zeros(n_cols, dtype=bool)
        sink = -1
        min_val = 0.0
        i = cur_row
        while sink == -1:
            d = min_val + cost[i] - u[i] - v
            better = ~done_cols & (d < shortest)
            shortest[better] = d[better]
            path[better] = i
            masked = np.where(done_cols, np.inf, shortest)
            j = int(np.argmin(masked))
            min_val = masked[j]
            if not np.isfinite(min_val):
                raise ValueError("cost matrix is infeasible")
            done_cols[j] = True
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]
        # dual update: rows on the alternating tree are the assigned rows of
        # the scanned columns (the sink has none)
        u[cur_row] += min_val
        js = np.nonzero(done_cols)[0]
        tree_rows = row4col[js]
        assigned = tree_rows >= 0
        u[tree_rows[assigned]] += min_val - shortest[js[assigned]]
        v[js] += shortest[js] - min_val
        # augment along the stored predecessor path
        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            col4row[i], j = j, col4row[i]
            if i == cur_row:
                break
    return col4row
