"""Numba-compiled hot kernels.

Same signatures and semantics as ``_numpy_kernels``; this module is the
default backend when numba imports cleanly.  All kernels are nopython and
cached to disk, so the compile cost is paid once per environment.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_PMIN = 1e-5
_WMIN = 1e-5


@njit(cache=True)
def cell_counts(levels, y01, kmax):
    n, p = levels.shape
    counts = np.zeros((p, kmax, 2), dtype=np.float64)
    for i in range(n):
        yi = y01[i]
        for j in range(p):
            counts[j, levels[i, j], yi] += 1.0
    return counts


@njit(cache=True)
def dcov_categorical(counts, scores, kcounts):
    p = counts.shape[0]
    out = np.zeros(p)
    degen = np.zeros(p, dtype=np.bool_)
    n0 = 0.0
    n1 = 0.0
    for k in range(counts.shape[1]):
        n0 += counts[0, k, 0]
        n1 += counts[0, k, 1]
    n = n0 + n1
    v2yy = (2.0 * n0 * n1 / (n * n)) ** 2
    for j in range(p):
        kj = kcounts[j]
        atot = 0.0
        sxx_raw = 0.0
        sxy_raw = 0.0
        cross = 0.0
        arow_dot = 0.0
        for k in range(kj):
            nk_k = counts[j, k, 0] + counts[j, k, 1]
            arow_k = 0.0
            for l in range(kj):
                nl = counts[j, l, 0] + counts[j, l, 1]
                d = abs(scores[j, k] - scores[j, l])
                arow_k += nl * d
                sxx_raw += nk_k * nl * d * d
                sxy_raw += d * (counts[j, k, 0] * counts[j, l, 1] + counts[j, k, 1] * counts[j, l, 0])
            atot += nk_k * arow_k
            arow_dot += nk_k * arow_k * arow_k
            cross += counts[j, k, 0] * arow_k * n1 + counts[j, k, 1] * arow_k * n0
        v2xy = sxy_raw / n**2 - 2.0 * cross / n**3 + atot * (2.0 * n0 * n1) / n**4
        v2xx = sxx_raw / n**2 - 2.0 * arow_dot / n**3 + (atot / n**2) ** 2
        if v2xx <= 0.0 or v2yy <= 0.0:
            degen[j] = True
        else:
            if v2xy < 0.0:
                v2xy = 0.0
            out[j] = v2xy / np.sqrt(v2xx * v2yy)
    return out, degen


@njit(cache=True)
def dcov_numeric(xt, y):
    p, n = xt.shape
    b = np.empty((n, n))
    brow = np.zeros(n)
    for i in range(n):
        for k in range(n):
            d = abs(y[i] - y[k])
            b[i, k] = d
            brow[i] += d
    btot = 0.0
    sbb = 0.0
    brow_dot = 0.0
    for i in range(n):
        btot += brow[i]
        brow_dot += brow[i] * brow[i]
        for k in range(n):
            sbb += b[i, k] * b[i, k]
    v2yy = sbb / n**2 - 2.0 * brow_dot / n**3 + (btot / n**2) ** 2
    out = np.zeros(p)
    degen = np.zeros(p, dtype=np.bool_)
    arow = np.zeros(n)
    for j in range(p):
        for i in range(n):
            arow[i] = 0.0
        for i in range(n):
            xi = xt[j, i]
            for k in range(i + 1, n):
                d = abs(xi - xt[j, k])
                arow[i] += d
                arow[k] += d
        atot = 0.0
        cross = 0.0
        arow_dot = 0.0
        for i in range(n):
            atot += arow[i]
            cross += arow[i] * brow[i]
            arow_dot += arow[i] * arow[i]
        sab = 0.0
        saa = 0.0
        for i in range(n):
            xi = xt[j, i]
            for k in range(n):
                d = abs(xi - xt[j, k])
                sab += d * b[i, k]
                saa += d * d
        v2xy = sab / n**2 - 2.0 * cross / n**3 + atot * btot / n**4
        v2xx = saa / n**2 - 2.0 * arow_dot / n**3 + (atot / n**2) ** 2
        if v2xx <= 0.0 or v2yy <= 0.0:
            degen[j] = True
        else:
            if v2xy < 0.0:
                v2xy = 0.0
            out[j] = v2xy / np.sqrt(v2xx * v2yy)
    return out, degen


@njit(cache=True)
def mmle_fit_cells(counts, scores, kcounts, max_iter, tol, cap):
    p = counts.shape[0]
    beta_abs = np.zeros(p)
    status = np.zeros(p, dtype=np.uint8)
    for j in range(p):
        kj = kcounts[j]
        n = 0.0
        n1 = 0.0
        sx = 0.0
        for k in range(kj):
            nk = counts[j, k, 0] + counts[j, k, 1]
            n += nk
            n1 += counts[j, k, 1]
            sx += nk * scores[j, k]
        meanx = sx / n
        varx = 0.0
        for k in range(kj):
            nk = counts[j, k, 0] + counts[j, k, 1]
            varx += nk * (scores[j, k] - meanx) ** 2
        varx /= n
        if varx <= 0.0:
            status[j] = 1
            continue
        ybar = n1 / n
        a = np.log(ybar / (1.0 - ybar))
        bcoef = 0.0
        st = 2
        for _ in range(max_iter):
            g0 = 0.0
            g1 = 0.0
            h00 = 0.0
            h01 = 0.0
            h11 = 0.0
            for k in range(kj):
                v = scores[j, k]
                nk = counts[j, k, 0] + counts[j, k, 1]
                eta = a + bcoef * v
                pk = 1.0 / (1.0 + np.exp(-eta))
                w = nk * pk * (1.0 - pk)
                r = counts[j, k, 1] - nk * pk
                g0 += r
                g1 += v * r
                h00 += w
                h01 += v * w
                h11 += v * v * w
            det = h00 * h11 - h01 * h01
            if det <= 1e-12 or not np.isfinite(det):
                break
            da = (h11 * g0 - h01 * g1) / det
            db = (-h01 * g0 + h00 * g1) / det
            if not (np.isfinite(da) and np.isfinite(db)):
                break
            a += da
            bcoef += db
            if max(abs(da), abs(db)) < tol:
                st = 0
                break
        beta_abs[j] = abs(bcoef)
        if st != 0 or abs(bcoef) > cap:
            status[j] = 2
    return beta_abs, status


@njit(cache=True)
def _sigmoid_scalar(eta):
    if eta >= 0.0:
        return 1.0 / (1.0 + np.exp(-eta))
    ex = np.exp(eta)
    return ex / (1.0 + ex)


@njit(cache=True)
def _kkt_residual(x, y, eta, beta, lam, alpha, pf):
    n, p = x.shape
    worst = 0.0
    gint = 0.0
    for i in range(n):
        gint += y[i] - _sigmoid_scalar(eta[i])
    worst = abs(gint / n)
    for j in range(p):
        g = 0.0
        for i in range(n):
            g -= x[i, j] * (y[i] - _sigmoid_scalar(eta[i]))
        g /= n
        l1 = lam * alpha * pf[j]
        l2 = lam * (1.0 - alpha) * pf[j]
        if beta[j] == 0.0:
            r = abs(g) - l1
        elif beta[j] > 0.0:
            r = abs(g + l2 * beta[j] + l1)
        else:
            r = abs(g + l2 * beta[j] - l1)
        if r > worst:
            worst = r
    return worst


@njit(cache=True)
def enet_path(x, y, lambdas, alpha, pf, kkt_eps, max_outer, max_cd):
    n, p = x.shape
    nl = lambdas.size
    b0s = np.zeros(nl)
    betas = np.zeros((nl, p))
    kkts = np.zeros(nl)
    iters = np.zeros(nl, dtype=np.int64)
    ybar = 0.0
    for i in range(n):
        ybar += y[i]
    ybar /= n
    if ybar < _PMIN:
        ybar = _PMIN
    if ybar > 1.0 - _PMIN:
        ybar = 1.0 - _PMIN
    b0 = np.log(ybar / (1.0 - ybar))
    beta = np.zeros(p)
    eta = np.empty(n)
    mu = np.empty(n)
    w = np.empty(n)
    r = np.empty(n)
    wx2 = np.empty(p)
    for i in range(n):
        eta[i] = b0
        for j in range(p):
            eta[i] += x[i, j] * beta[j]
    for li in range(nl):
        lam = lambdas[li]
        it = 0
        for outer in range(1, max_outer + 1):
            it = outer
            wsum = 0.0
            for i in range(n):
                m = _sigmoid_scalar(eta[i])
                mu[i] = m
                wi = m * (1.0 - m)
                if wi < _WMIN:
                    wi = _WMIN
                w[i] = wi
                r[i] = (y[i] - m) / wi
                wsum += wi
            for j in range(p):
                s = 0.0
                for i in range(n):
                    s += w[i] * x[i, j] * x[i, j]
                wx2[j] = s / n
            for _ in range(max_cd):
                dmax = 0.0
                d0 = 0.0
                for i in range(n):
                    d0 += w[i] * r[i]
                d0 /= wsum
                if d0 != 0.0:
                    b0 += d0
                    for i in range(n):
                        r[i] -= d0
                    dmax = abs(d0)
                for j in range(p):
                    bj = beta[j]
                    rho = 0.0
                    for i in range(n):
                        rho += w[i] * x[i, j] * r[i]
                    rho = rho / n + wx2[j] * bj
                    thr = lam * alpha * pf[j]
                    if abs(rho) <= thr:
                        bjn = 0.0
                    else:
                        z = rho - thr if rho > 0.0 else rho + thr
                        bjn = z / (wx2[j] + lam * (1.0 - alpha) * pf[j])
                    d = bjn - bj
                    if d != 0.0:
                        beta[j] = bjn
                        for i in range(n):
                            r[i] -= d * x[i, j]
                        ad = abs(d)
                        if ad > dmax:
                            dmax = ad
                if dmax < 1e-12:
                    break
            for i in range(n):
                e = b0
                for j in range(p):
                    e += x[i, j] * beta[j]
                eta[i] = e
            kkt = _kkt_residual(x, y, eta, beta, lam, alpha, pf)
            if kkt <= kkt_eps * 1e-2:
                break
        b0s[li] = b0
        for j in range(p):
            betas[li, j] = beta[j]
        kkts[li] = _kkt_residual(x, y, eta, beta, lam, alpha, pf)
        iters[li] = it
    return b0s, betas, kkts, iters
