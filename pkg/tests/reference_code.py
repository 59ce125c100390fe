"""Loop-for-loop port of the original MATLAB routines, used only as a test oracle.

Indices stay 1-based inside the loops to keep the port line-comparable; the
flat arrays are 0-based Python lists offset by one.  Nothing here imports
from ``dcfs``.
"""
import numpy as np


def meb2(n, i, x, xmin, xmax):
    h = (xmax - xmin) / (n - 1)
    y = None
    if i == 1:
        if x < xmin:
            y = 1.0
        if xmin <= x < xmin + h:
            y = (xmin - x + h) / h
        if x >= xmin + h:
            y = 0.0
    if 1 < i < n:
        if x < xmin + (i - 2) * h or x > xmin + i * h:
            y = 0.0
        if xmin + (i - 2) * h <= x < xmin + (i - 1) * h:
            y = (x - xmin - (i - 2) * h) / h
        if xmin + (i - 1) * h <= x <= xmin + i * h:
            y = (-x + xmin + i * h) / h
    if i == n:
        if x < xmax - h:
            y = 0.0
        if xmax - h <= x < xmax:
            y = (-xmax + x + h) / h
        if x >= xmax:
            y = 1.0
    return y


def _base_counts(num_input, mm):
    base = [1] * (num_input + 1)
    for i in range(2, num_input + 1):
        base[i] = 1
        for _ in range(2, i + 1):
            base[i] *= mm
    return base


def wmdeepzb(mm, xx, y):
    """Returns ``(zb, ranges)``: flat rule centers and per-input (min, max)."""
    xx = np.asarray(xx, dtype=float)
    num_samples, num_input = xx.shape
    ranges = [(float(xx[:, i].min()), float(xx[:, i].max())) for i in range(num_input)]
    num_cells = mm**num_input
    base = _base_counts(num_input, mm)
    zb = [0.0] * (num_cells + 1)
    ym = [0.0] * (num_cells + 1)
    act_fns = [[0, 0] for _ in range(num_input + 1)]
    act_grades = [[0.0, 0.0] for _ in range(num_input + 1)]
    for k in range(num_samples):
        for i in range(1, num_input + 1):
            nth = 0
            for fn in range(1, mm + 1):
                g = meb2(mm, fn, xx[k, i - 1], *ranges[i - 1])
                if g > 0:
                    act_fns[i][nth] = fn
                    act_grades[i][nth] = g
                    nth += 1
        path = [None] * (num_input + 1)
        for i in range(1, num_input + 1):
            if act_grades[i][0] >= act_grades[i][1]:
                path[i] = (act_fns[i][0], act_grades[i][0])
            else:
                path[i] = (act_fns[i][1], act_grades[i][1])
        cell = 1
        grade = 1.0
        for i in range(1, num_input + 1):
            grade *= path[i][1]
            cell += (path[num_input - i + 1][0] - 1) * base[i]
        ym[cell] += grade
        zb[cell] += y[k] * grade
    for j in range(1, num_cells + 1):
        if ym[j] != 0:
            zb[j] = zb[j] / ym[j]

    # extrapolation: strides per coordinate, most significant first
    stride = [mm ** (num_input - 1 - d) for d in range(num_input)]
    # allocated once, as in the original; still-uncovered cells only ever add zeros
    zbb = [0.0] * (num_cells + 1)
    ymm = [0.0] * (num_cells + 1)
    while any(ym[s] == 0 for s in range(1, num_cells + 1)):
        for s in range(1, num_cells + 1):
            if ym[s] != 0:
                continue
            rest = s - 1
            index = []
            for d in range(num_input):
                q_, rest = divmod(rest, stride[d])
                index.append(q_ + 1)
            zbnum = 0
            for d in range(num_input):
                if index[d] > 1:
                    nb = s - stride[d]
                    zbb[s] += zb[nb]
                    ymm[s] += ym[nb]
                    zbnum += np.sign(ym[nb])
                if index[d] < mm:
                    nb = s + stride[d]
                    zbb[s] += zb[nb]
                    ymm[s] += ym[nb]
                    zbnum += np.sign(ym[nb])
            if zbnum >= 1:
                zbb[s] /= zbnum
                ymm[s] /= zbnum
        for s in range(1, num_cells + 1):
            if ym[s] == 0 and ymm[s] != 0:
                zb[s] = zbb[s]
                ym[s] = ymm[s]
    return np.array(zb[1:]), ranges


def wmdeepyy(mm, zb, ranges, xx, reset_slots=True):
    """Fuzzy-system output for each row of ``xx``.

    The MATLAB routine never clears its two active-set slots between samples,
    so when only one set fires (input at a center or outside the range) the
    second slot keeps the previous sample's grade.  ``reset_slots=False``
    reproduces that; the default clears the slots.
    """
    xx = np.asarray(xx, dtype=float)
    num_samples, num_input = xx.shape
    base = _base_counts(num_input, mm)
    ma = [[0] * (num_input + 1) for _ in range(2**num_input + 1)]
    for j in range(1, num_input + 1):
        for i1 in range(1, 2**j + 1):
            for i2 in range(1, 2 ** (num_input - j) + 1):
                ma[i2 + (i1 - 1) * 2 ** (num_input - j)][j] = (i1 - 1) % 2 + 1
    act_fns = [[0, 0] for _ in range(num_input + 1)]
    act_grades = [[0.0, 0.0] for _ in range(num_input + 1)]
    out = np.empty(num_samples)
    for k in range(num_samples):
        for i in range(1, num_input + 1):
            if reset_slots:
                act_fns[i] = [0, 0]
                act_grades[i] = [0.0, 0.0]
            nth = 0
            for fn in range(1, mm + 1):
                g = meb2(mm, fn, xx[k, i - 1], *ranges[i - 1])
                if g > 0:
                    act_fns[i][nth] = fn
                    act_grades[i][nth] = g
                    nth += 1
        nn = [None] * (num_input + 1)
        for i in range(1, num_input + 1):
            lo = act_fns[i][0]
            nn[i] = (lo, lo if lo == mm else lo + 1)
        a = 0.0
        b = 0.0
        for i in range(1, 2**num_input + 1):
            cell = 1
            grade = 1.0
            for j in range(1, num_input + 1):
                grade *= act_grades[j][ma[i][j] - 1]
                cell += (nn[num_input - j + 1][ma[i][num_input - j + 1] - 1] - 1) * base[j]
            a += zb[cell - 1] * grade
            b += grade
        out[k] = a / b
    return out


def single_active(mm, ranges, xx):
    """Rows where some input fires exactly one set (where the stale slot matters)."""
    xx = np.asarray(xx, dtype=float)
    rows = np.zeros(len(xx), dtype=bool)
    for k in range(len(xx)):
        for i, (lo, hi) in enumerate(ranges):
            n_active = sum(meb2(mm, fn, xx[k, i], lo, hi) > 0 for fn in range(1, mm + 1))
            rows[k] |= n_active == 1
    return rows


def deep_chain(mm, X, y, m, n_train):
    """Train and evaluate an overlapping-window DCFS exactly as the main script does.

    Windows are ``columns i .. i+m-1`` of the previous level.  Returns the
    per-level ``(zb, ranges)`` list and the output for every row of ``X``.
    """
    X = np.asarray(X, dtype=float)
    level_tr = X[:n_train]
    level_all = X
    systems = []
    while True:
        width = level_tr.shape[1] - m + 1
        fss = [wmdeepzb(mm, level_tr[:, i:i + m], y[:n_train]) for i in range(width)]
        systems.append(fss)
        level_tr = np.column_stack([wmdeepyy(mm, zb, rg, level_tr[:, i:i + m]) for i, (zb, rg) in enumerate(fss)])
        level_all = np.column_stack([wmdeepyy(mm, zb, rg, level_all[:, i:i + m]) for i, (zb, rg) in enumerate(fss)])
        if width == 1:
            return systems, level_all[:, 0]
