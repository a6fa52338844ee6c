"""
Exact matrix helpers over cyclotomic numbers.

Matrices are numpy object arrays whose entries are CycNumber (never raw ints).
Products skip zero entries; most matrices built here are very sparse.
"""
from typing import List, Optional, Sequence

import numpy as np

from .cyclo import ONE, ZERO, as_cyc
from .exceptions import DivisionByZero, ShapeMismatch


def zeros(n: int, m: int) -> np.ndarray:
    return np.full((n, m), ZERO, dtype=object)


def identity(n: int) -> np.ndarray:
    a = zeros(n, n)
    for i in range(n):
        a[i, i] = ONE
    return a


def diag(values: Sequence) -> np.ndarray:
    a = zeros(len(values), len(values))
    for i, v in enumerate(values):
        a[i, i] = as_cyc(v)
    return a


def from_rows(rows) -> np.ndarray:
    rows = [list(r) for r in rows]
    n, m = len(rows), len(rows[0]) if rows else 0
    a = zeros(n, m)
    for i, row in enumerate(rows):
        if len(row) != m:
            raise ShapeMismatch('ragged matrix rows')
        for j, x in enumerate(row):
            a[i, j] = as_cyc(x)
    return a


def _sparse_rows(a: np.ndarray):
    return [[(j, a[i, j]) for j in range(a.shape[1]) if a[i, j]] for i in range(a.shape[0])]


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f'cannot multiply {a.shape} by {b.shape}')
    rows_b = _sparse_rows(b)
    out = zeros(a.shape[0], b.shape[1])
    for i in range(a.shape[0]):
        acc = {}
        for k in range(a.shape[1]):
            x = a[i, k]
            if not x:
                continue
            for j, y in rows_b[k]:
                acc[j] = acc[j] + x * y if j in acc else x * y
        for j, v in acc.items():
            out[i, j] = v
    return out


def chain(*mats: np.ndarray) -> np.ndarray:
    # chain(A, B, C) = A @ B @ C
    result = mats[-1]
    for m in reversed(mats[:-1]):
        result = matmul(m, result)
    return result


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = b.shape
    out = zeros(a.shape[0] * n, a.shape[1] * m)
    nz_b = [(k, l, b[k, l]) for k in range(n) for l in range(m) if b[k, l]]
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            x = a[i, j]
            if not x:
                continue
            for k, l, y in nz_b:
                out[i * n + k, j * m + l] = x * y
    return out


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ShapeMismatch(f'cannot add {a.shape} and {b.shape}')
    out = zeros(*a.shape)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            x, y = a[i, j], b[i, j]
            if x and y:
                out[i, j] = x + y
            elif x:
                out[i, j] = x
            elif y:
                out[i, j] = y
    return out


def scale(a: np.ndarray, c) -> np.ndarray:
    c = as_cyc(c)
    out = zeros(*a.shape)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j]:
                out[i, j] = a[i, j] * c
    return out


def sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return add(a, scale(b, -1))


def combine(terms) -> np.ndarray:
    """Sum of c * M over (c, M) pairs."""
    result = None
    for c, m in terms:
        t = scale(m, c)
        result = t if result is None else add(result, t)
    return result


def power(a: np.ndarray, k: int) -> np.ndarray:
    result = identity(a.shape[0])
    for _ in range(k):
        result = matmul(result, a)
    return result


def transpose(a: np.ndarray) -> np.ndarray:
    return a.T.copy()


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape != b.shape:
        return False
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != b[i, j]:
                return False
    return True


def is_zero(a: np.ndarray) -> bool:
    return not any(a[i, j] for i in range(a.shape[0]) for j in range(a.shape[1]))


def is_diagonal(a: np.ndarray) -> bool:
    return all(not a[i, j] for i in range(a.shape[0]) for j in range(a.shape[1]) if i != j)


def scalar_value(a: np.ndarray):
    """The c with a = c * Id, or None when a is not scalar."""
    if a.shape[0] != a.shape[1]:
        return None
    if a.shape[0] == 0:
        return ZERO
    if not is_diagonal(a):
        return None
    c = a[0, 0]
    if any(a[i, i] != c for i in range(1, a.shape[0])):
        return None
    return c


def trace(a: np.ndarray):
    total = ZERO
    for i in range(min(a.shape)):
        if a[i, i]:
            total = total + a[i, i]
    return total


def inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ShapeMismatch('only square matrices are invertible')
    eye = identity(n)
    m = [list(a[i]) + list(eye[i]) for i in range(n)]
    for c in range(n):
        for i in range(c, n):
            if m[i][c]:
                break
        else:
            raise DivisionByZero('singular matrix')
        m[c], m[i] = m[i], m[c]
        inv = m[c][c].inverse()
        m[c] = [x * inv if x else x for x in m[c]]
        for r in range(n):
            f = m[r][c]
            if r == c or not f:
                continue
            m[r] = [x - f * y if y else x for x, y in zip(m[r], m[c])]
    return from_rows([row[n:] for row in m])


def nullspace(rows: List[List], ncols: int, column_order: Optional[Sequence[int]] = None) -> List[List]:
    """
    Basis of {x : rows . x = 0} by Gauss-Jordan elimination.

    Columns are visited in `column_order` (default left to right); within a column the
    first row holding a nonzero entry becomes the pivot. Each free column contributes
    one basis vector with a 1 in that column.
    """
    m = [list(r) for r in rows]
    order = list(column_order) if column_order is not None else list(range(ncols))
    if sorted(order) != list(range(ncols)):
        raise ShapeMismatch('column_order must be a permutation of the columns')

    pivots = []
    piv_r = 0
    for c in order:
        for i in range(piv_r, len(m)):
            if m[i][c]:
                break
        else:
            continue
        if i != piv_r:
            m[piv_r], m[i] = m[i], m[piv_r]
        inv = m[piv_r][c].inverse()
        m[piv_r] = [x * inv if x else x for x in m[piv_r]]
        for r in range(len(m)):
            f = m[r][c]
            if r == piv_r or not f:
                continue
            m[r] = [x - f * y if y else x for x, y in zip(m[r], m[piv_r])]
        pivots.append((piv_r, c))
        piv_r += 1

    pivot_cols = {c for _, c in pivots}
    basis = []
    for free in order:
        if free in pivot_cols:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        for r, c in pivots:
            if m[r][free]:
                v[c] = -m[r][free]
        basis.append(v)
    return basis


def to_json(a: np.ndarray) -> list:
    return [[a[i, j].to_json() for j in range(a.shape[1])] for i in range(a.shape[0])]
