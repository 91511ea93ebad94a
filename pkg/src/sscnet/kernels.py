"""Hot inner loops, each with a numba path and a pure-numpy path.

The numba path is used when numba imports and the environment variable
``SSCNET_DISABLE_NUMBA`` is unset (or set to ``0``). Both paths are always
importable so that tests and ``benchmarks/bench_backends.py`` can compare them.

Pattern matrices reach this module as ``int8`` code arrays: 0 for ``0``,
1 for ``*`` and 2 for ``?``.
"""
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

DISABLE_ENV = "SSCNET_DISABLE_NUMBA"

ZERO, STAR, QUEST = 0, 1, 2

# enumeration hit modes
RANK_BELOW_ROWS = 0
E1_OUTSIDE_RANGE = 1


def _env_disabled():
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend():
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# color change rule


def _derived_set_loop(codes, black, order):
    p, q = codes.shape
    nv = black.shape[0]
    white_cnt = np.zeros(nv, np.int64)
    star_cnt = np.zeros(nv, np.int64)
    for i in range(q):
        for j in range(p):
            c = codes[j, i]
            if c != 0 and not black[j]:
                white_cnt[i] += 1
                if c == 1:
                    star_cnt[i] += 1
    trace = np.empty((nv, 2), np.int64)
    t = 0
    while True:
        fired = -1
        for k in range(order.shape[0]):
            i = order[k]
            if white_cnt[i] == 1 and star_cnt[i] == 1:
                fired = i
                break
        if fired < 0:
            break
        j = -1
        for r in range(p):
            if codes[r, fired] != 0 and not black[r]:
                j = r
                break
        black[j] = True
        trace[t, 0] = fired
        trace[t, 1] = j
        t += 1
        for i2 in range(q):
            c = codes[j, i2]
            if c != 0:
                white_cnt[i2] -= 1
                if c == 1:
                    star_cnt[i2] -= 1
    return black, trace[:t].copy()


_derived_set_jit = _njit(_derived_set_loop)


def derived_set_numpy(codes, black, order):
    """Vectorised-bookkeeping version of the color change fixpoint.

    Fires one forcing at a time, always the applicable node that comes first
    in ``order``; this makes its trace identical to the numba loop.
    """
    p, q = codes.shape
    nv = black.shape[0]
    black = black.copy()
    nz = codes != 0
    st = codes == 1
    white_rows = ~black[:p]
    white_cnt = np.zeros(nv, np.int64)
    star_cnt = np.zeros(nv, np.int64)
    white_cnt[:q] = nz[white_rows].sum(axis=0)
    star_cnt[:q] = st[white_rows].sum(axis=0)
    priority = np.empty(nv, np.int64)
    priority[order] = np.arange(nv)
    trace = []
    while True:
        ready = np.flatnonzero((white_cnt == 1) & (star_cnt == 1))
        if ready.size == 0:
            break
        i = ready[np.argmin(priority[ready])]
        j = np.flatnonzero(nz[:, i] & ~black[:p])[0]
        black[j] = True
        trace.append((i, j))
        white_cnt[:q] -= nz[j]
        star_cnt[:q] -= st[j]
    return black, np.array(trace, dtype=np.int64).reshape(-1, 2)


def derived_set_numba(codes, black, order):
    return _derived_set_jit(codes, black.copy(), order)


def derived_set(codes, black, order):
    """Run the color change rule to its fixpoint.

    Parameters
    ----------
    codes : (p, q) int8 array
    black : (max(p, q),) bool array, the initially black nodes (not modified)
    order : (max(p, q),) int64 permutation giving node priority

    Returns
    -------
    (black, trace) where trace rows are 0-based ``(forcing, forced)`` pairs.
    """
    codes = np.ascontiguousarray(codes, dtype=np.int8)
    black = np.ascontiguousarray(black, dtype=np.bool_)
    order = np.ascontiguousarray(order, dtype=np.int64)
    if USE_NUMBA:
        return derived_set_numba(codes, black, order)
    return derived_set_numpy(codes, black, order)


# ---------------------------------------------------------------------------
# pattern product


def _pattern_product_loop(m, n):
    p, q = m.shape
    s = n.shape[1]
    out = np.zeros((p, s), np.int8)
    for i in range(p):
        for j in range(s):
            terms = 0
            single_star = False
            for k in range(q):
                a = m[i, k]
                b = n[k, j]
                if a != 0 and b != 0:
                    terms += 1
                    single_star = a == 1 and b == 1
                    if terms > 1:
                        break
            if terms == 1 and single_star:
                out[i, j] = 1
            elif terms >= 1:
                out[i, j] = 2
    return out


_pattern_product_jit = _njit(_pattern_product_loop)


def pattern_product_numpy(m, n):
    terms = (m != 0).astype(np.int32) @ (n != 0).astype(np.int32)
    stars = (m == 1).astype(np.int32) @ (n == 1).astype(np.int32)
    out = np.where(terms == 0, ZERO, QUEST).astype(np.int8)
    out[(terms == 1) & (stars == 1)] = STAR
    return out


def pattern_product_numba(m, n):
    return _pattern_product_jit(m, n)


def pattern_product(m, n):
    m = np.ascontiguousarray(m, dtype=np.int8)
    n = np.ascontiguousarray(n, dtype=np.int8)
    if USE_NUMBA:
        return pattern_product_numba(m, n)
    return pattern_product_numpy(m, n)


# ---------------------------------------------------------------------------
# exact integer rank and grid enumeration


def _int_rank_loop(x):
    # fraction-free (Bareiss) elimination; every intermediate is a minor of x
    a = x.copy()
    m, n = a.shape
    row = 0
    prev = 1
    for col in range(n):
        if row == m:
            break
        piv = -1
        for r in range(row, m):
            if a[r, col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != row:
            for c in range(n):
                tmp = a[row, c]
                a[row, c] = a[piv, c]
                a[piv, c] = tmp
        pv = a[row, col]
        for r in range(row + 1, m):
            f = a[r, col]
            for c in range(col + 1, n):
                a[r, c] = (a[r, c] * pv - f * a[row, c]) // prev
            a[r, col] = 0
        prev = pv
        row += 1
    return row


def _scan_loop(p, q, rows, cols, table, radices, start, stop, mode):
    nfree = rows.shape[0]
    x = np.zeros((p, q), np.int64)
    xe = np.zeros((p, q + 1), np.int64)
    digits = np.zeros(nfree, np.int64)
    k = start
    for f in range(nfree - 1, -1, -1):
        digits[f] = k % radices[f]
        k //= radices[f]
    for idx in range(start, stop):
        for f in range(nfree):
            x[rows[f], cols[f]] = table[f, digits[f]]
        if mode == 0:
            if _int_rank_jit(x) < p:
                return idx
        else:
            for r in range(p):
                for c in range(q):
                    xe[r, c] = x[r, c]
            xe[0, q] = 1
            if _int_rank_jit(xe) > _int_rank_jit(x):
                return idx
        f = nfree - 1
        while f >= 0:
            digits[f] += 1
            if digits[f] < radices[f]:
                break
            digits[f] = 0
            f -= 1
    return -1


if HAVE_NUMBA:
    _int_rank_jit = _njit(_int_rank_loop)
    _scan_jit = _njit(_scan_loop)
else:  # pragma: no cover
    _int_rank_jit = _int_rank_loop
    _scan_jit = _scan_loop


def int_rank(x):
    """Exact rank of a small integer matrix."""
    x = np.ascontiguousarray(x, dtype=np.int64)
    if x.size == 0:
        return 0
    if USE_NUMBA:
        return int(_int_rank_jit(x))
    return int(np.linalg.matrix_rank(x.astype(np.float64)))


def grid_table(codes, star_values, quest_values):
    """Free positions of a pattern and the value table each one ranges over."""
    rows, cols = np.nonzero(codes)
    star_values = np.asarray(star_values, dtype=np.int64)
    quest_values = np.asarray(quest_values, dtype=np.int64)
    width = max(star_values.size, quest_values.size)
    table = np.zeros((rows.size, width), np.int64)
    radices = np.zeros(rows.size, np.int64)
    for f, (r, c) in enumerate(zip(rows, cols)):
        vals = star_values if codes[r, c] == STAR else quest_values
        table[f, : vals.size] = vals
        radices[f] = vals.size
    return rows.astype(np.int64), cols.astype(np.int64), table, radices


def decode_realization(codes, table_info, index):
    rows, cols, table, radices = table_info
    x = np.zeros(codes.shape, np.int64)
    for f in range(rows.size - 1, -1, -1):
        d = index % radices[f]
        index //= radices[f]
        x[rows[f], cols[f]] = table[f, d]
    return x


def _scan_numpy(codes, table_info, start, stop, mode, chunk=1 << 14):
    rows, cols, table, radices = table_info
    p, q = codes.shape
    for lo in range(start, stop, chunk):
        hi = min(stop, lo + chunk)
        idx = np.arange(lo, hi, dtype=np.int64)
        x = np.zeros((hi - lo, p, q), np.float64)
        rem = idx.copy()
        for f in range(rows.size - 1, -1, -1):
            d = rem % radices[f]
            rem //= radices[f]
            x[:, rows[f], cols[f]] = table[f, d]
        rank = np.linalg.matrix_rank(x)
        if mode == RANK_BELOW_ROWS:
            hits = np.flatnonzero(rank < p)
        else:
            xe = np.zeros((hi - lo, p, q + 1), np.float64)
            xe[:, :, :q] = x
            xe[:, 0, q] = 1.0
            hits = np.flatnonzero(np.linalg.matrix_rank(xe) > rank)
        if hits.size:
            return int(lo + hits[0])
    return -1


def scan_grid(codes, table_info, mode, start=0, stop=None):
    """Index of the first grid realization that hits ``mode``, or -1.

    ``RANK_BELOW_ROWS`` hits realizations without full row rank;
    ``E1_OUTSIDE_RANGE`` hits realizations whose column space misses e1.
    """
    codes = np.ascontiguousarray(codes, dtype=np.int8)
    rows, cols, table, radices = table_info
    total = int(np.prod(radices, dtype=object)) if radices.size else 1
    stop = total if stop is None else min(stop, total)
    if USE_NUMBA:
        p, q = codes.shape
        return int(_scan_jit(p, q, rows, cols, table, radices, start, stop, mode))
    return _scan_numpy(codes, table_info, start, stop, mode)
