"""Pure-Python kernels, used when the compiled extension is unavailable.

Every function here has a twin of the same signature in ``_ckernels.pyx``.
Both walk the input pairs and the per-mode branches in the same order and
multiply weights in the same order, so the two backends agree bit for bit.

Array conventions: multi-indices are ``int32`` arrays of shape ``(nnz, m)``,
coefficients are ``float64`` arrays of shape ``(nnz,)``.
"""
import numpy as np

BACKEND = "python"


def _pack(rows, coeffs, m):
    idx = np.array(rows, dtype=np.int32).reshape(len(rows), m)
    return idx, np.array(coeffs, dtype=np.float64)


def linearized_product(ia, ca, ib, cb, N, table):
    """Product of two Hermite expansions under the per-mode rule

        h_a * h_b = sum_j table[a, b, j] h_{a+b-2j}

    with output degree capped at ``N``. Returns ``(idx, coeffs, truncated)``.
    """
    m = ia.shape[1]
    A = ia.tolist()
    B = ib.tolist()
    xa = ca.tolist()
    yb = cb.tolist()
    W = table.tolist()
    acc = {}
    truncated = False
    floor = [0] * (m + 1)
    for a, x in zip(A, xa):
        for b, y in zip(B, yb):
            for i in range(m - 1, -1, -1):
                floor[i] = floor[i + 1] + abs(a[i] - b[i])
            if floor[0] > N:
                truncated = True
                continue
            # depth-first over per-mode contraction orders j
            stack = [(0, 0, x * y, ())]
            while stack:
                i, deg, w, gamma = stack.pop()
                if i == m:
                    if gamma in acc:
                        acc[gamma] += w
                    else:
                        acc[gamma] = w
                    continue
                ai, bi = a[i], b[i]
                children = []
                for j in range(min(ai, bi) + 1):
                    g = ai + bi - 2 * j
                    if deg + g + floor[i + 1] > N:
                        truncated = True
                        continue
                    children.append((i + 1, deg + g, w * W[ai][bi][j], gamma + (g,)))
                # reversed so that j = 0 is expanded first, as in the C loop
                stack.extend(reversed(children))
    rows = list(acc)
    idx, coeffs = _pack(rows, [acc[r] for r in rows], m)
    return idx, coeffs, truncated


def wick_product(ia, ca, ib, cb, N):
    m = ia.shape[1]
    acc = {}
    truncated = False
    B = [(tuple(b), sum(b), y) for b, y in zip(ib.tolist(), cb.tolist())]
    for a, x in zip(ia.tolist(), ca.tolist()):
        da = sum(a)
        for b, db, y in B:
            if da + db > N:
                truncated = True
                continue
            gamma = tuple(p + q for p, q in zip(a, b))
            w = x * y
            if gamma in acc:
                acc[gamma] += w
            else:
                acc[gamma] = w
    rows = list(acc)
    idx, coeffs = _pack(rows, [acc[r] for r in rows], m)
    return idx, coeffs, truncated


def hermite_table(xi, N):
    """Probabilists' Hermite values h_0..h_N at every entry of ``xi``.

    Output shape is ``xi.shape + (N + 1,)``.
    """
    xi = np.asarray(xi, dtype=np.float64)
    H = np.empty(xi.shape + (N + 1,))
    H[..., 0] = 1.0
    if N >= 1:
        H[..., 1] = xi
    for k in range(1, N):
        H[..., k + 1] = xi * H[..., k] - k * H[..., k - 1]
    return H


def evaluate(idx, coeffs, xi, N):
    """Evaluate sum_alpha c_alpha prod_i h_{alpha_i}(xi_i) at each row of ``xi``."""
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    S, m = xi.shape
    H = hermite_table(xi, N)
    out = np.zeros(S)
    for a, c in zip(idx.tolist(), coeffs.tolist()):
        v = np.full(S, c)
        for i in range(m):
            if a[i]:
                v *= H[:, i, a[i]]
        out += v
    return out
