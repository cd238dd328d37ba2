"""NumPy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used when
the extension is unavailable or ``ENTCONC_PURE_PYTHON`` is set.
"""
import numpy as np
from scipy.special import gammaln

_LN2 = np.log(2.0)
_CHUNK = 1 << 20


def log2_dim_v_rows(parts):
    parts = np.ascontiguousarray(parts, dtype=np.int64)
    if parts.ndim != 2:
        raise ValueError("parts must be a 2-D array (rows are padded partitions)")
    m, d = parts.shape
    ell = parts + np.arange(d - 1, -1, -1, dtype=np.int64)
    n = parts.sum(axis=1)
    out = gammaln(n + 1.0) - gammaln(ell + 1.0).sum(axis=1)
    for i in range(d):
        for j in range(i + 1, d):
            out = out + np.log((ell[:, i] - ell[:, j]).astype(np.float64))
    return out / _LN2


def _entropy_and_divergence(q, p):
    # q: (k, d) rows on the simplex; returns H(q), D(q||p) in bits
    with np.errstate(divide="ignore", invalid="ignore"):
        lq = np.where(q > 0, np.log2(np.where(q > 0, q, 1.0)), 0.0)
        h = -(q * lq).sum(axis=1)
        lp = np.log2(np.where(p > 0, p, 1.0))
        terms = np.where(q > 0, q * (lq - lp), 0.0)
        bad = ((q > 0) & (p == 0)).any(axis=1)
    div = terms.sum(axis=1)
    div[bad] = np.inf
    return h, div


def grid_min_simplex(p, rate, upper, lo1, hi1, m1, lo2=0.0, hi2=0.0, m2=1):
    """Minimise D(q||p) over a rectangular grid of the simplex.

    ``d == 2``: ``q = (t, 1 - t)`` with ``t`` on ``linspace(lo1, hi1, m1)``.
    ``d == 3``: ``q = (s, t, 1 - s - t)`` with ``s``/``t`` on the two
    linspaces; points outside the simplex are skipped. Feasibility is
    ``H(q) >= rate`` when ``upper`` else ``H(q) <= rate``.

    Returns ``(best, q1, q2)``; ``best`` is ``inf`` when nothing is feasible.
    """
    p = np.asarray(p, dtype=np.float64)
    d = p.shape[0]
    best, b1, b2 = np.inf, np.nan, np.nan
    s_axis = np.linspace(lo1, hi1, m1) if m1 > 1 else np.array([lo1])
    if d == 2:
        for start in range(0, s_axis.size, _CHUNK):
            s = s_axis[start:start + _CHUNK]
            s = s[(s >= 0) & (s <= 1)]
            q = np.stack([s, 1.0 - s], axis=1)
            h, div = _entropy_and_divergence(q, p)
            ok = h >= rate if upper else h <= rate
            if ok.any():
                idx = np.argmin(np.where(ok, div, np.inf))
                if div[idx] < best:
                    best, b1, b2 = float(div[idx]), float(s[idx]), float(1.0 - s[idx])
        return best, b1, b2
    if d != 3:
        raise ValueError("grid oracle supports d in {2, 3}")
    t_axis = np.linspace(lo2, hi2, m2) if m2 > 1 else np.array([lo2])
    rows = max(1, _CHUNK // max(1, t_axis.size))
    for start in range(0, s_axis.size, rows):
        s = s_axis[start:start + rows]
        ss, tt = np.meshgrid(s, t_axis, indexing="ij")
        ss = ss.ravel()
        tt = tt.ravel()
        rr = 1.0 - ss - tt
        keep = (ss >= 0) & (tt >= 0) & (rr >= -1e-15) & (ss <= 1) & (tt <= 1)
        ss, tt, rr = ss[keep], tt[keep], np.clip(rr[keep], 0.0, None)
        if ss.size == 0:
            continue
        q = np.stack([ss, tt, rr], axis=1)
        h, div = _entropy_and_divergence(q, p)
        ok = h >= rate if upper else h <= rate
        if ok.any():
            idx = np.argmin(np.where(ok, div, np.inf))
            if div[idx] < best:
                best, b1, b2 = float(div[idx]), float(ss[idx]), float(tt[idx])
    return best, b1, b2
