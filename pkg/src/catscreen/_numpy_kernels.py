"""Pure-numpy reference implementations of the hot kernels.

Functionally identical to the numba versions in ``_numba_kernels``;
selected via the ``CATSCREEN_BACKEND=numpy`` environment flag or when
numba is unavailable.  The elastic-net path keeps a Python-level
coordinate loop, so it is the slow-but-obvious reference.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_PMIN = 1e-5
_WMIN = 1e-5


def cell_counts(levels, y01, kmax):
    """Per-feature contingency counts.

    levels : (n, p) int64 level indices, y01 : (n,) int64 in {0, 1}.
    Returns (p, kmax, 2) float64 counts.
    """
    n, p = levels.shape
    flat = (np.arange(p, dtype=np.int64) * (kmax * 2))[None, :] + levels * 2 + y01[:, None]
    counts = np.bincount(flat.ravel(), minlength=p * kmax * 2).astype(np.float64)
    return counts.reshape(p, kmax, 2)


def dcov_categorical(counts, scores, kcounts):
    """Squared distance correlation of each scored categorical feature with a
    binary response, computed from contingency counts.

    counts : (p, kmax, 2) cell counts, scores : (p, kmax) level scores,
    kcounts : (p,) number of levels per feature.
    Returns (dcor2 (p,), degenerate (p,) bool).
    """
    p = counts.shape[0]
    out = np.zeros(p)
    degen = np.zeros(p, dtype=bool)
    n0 = counts[0, :, 0].sum()
    n1 = counts[0, :, 1].sum()
    n = n0 + n1
    v2yy = (2.0 * n0 * n1 / (n * n)) ** 2
    for j in range(p):
        kj = kcounts[j]
        c = counts[j, :kj, :]
        v = scores[j, :kj]
        nk = c.sum(axis=1)
        d = np.abs(v[:, None] - v[None, :])
        arow = d @ nk
        atot = nk @ arow
        sxx_raw = nk @ (d * d) @ nk
        sxy_raw = float(np.sum(d * (np.outer(c[:, 0], c[:, 1]) + np.outer(c[:, 1], c[:, 0]))))
        brow = np.array([n1, n0])
        cross = float(np.sum(c * (arow[:, None] * brow[None, :])))
        v2xy = sxy_raw / n**2 - 2.0 * cross / n**3 + atot * (2.0 * n0 * n1) / n**4
        v2xx = sxx_raw / n**2 - 2.0 * (nk @ (arow * arow)) / n**3 + (atot / n**2) ** 2
        if v2xx <= 0.0 or v2yy <= 0.0:
            degen[j] = True
        else:
            out[j] = max(v2xy, 0.0) / np.sqrt(v2xx * v2yy)
    return out, degen


def dcov_numeric(xt, y):
    """Squared distance correlation of each column of a numeric matrix with y.

    xt : (p, n) float64 (features in rows), y : (n,) float64.
    Returns (dcor2 (p,), degenerate (p,) bool).  O(n^2) memory and time.
    """
    p, n = xt.shape
    b = np.abs(y[:, None] - y[None, :])
    brow = b.sum(axis=1)
    btot = brow.sum()
    v2yy = float(np.sum(b * b)) / n**2 - 2.0 * (brow @ brow) / n**3 + (btot / n**2) ** 2
    out = np.zeros(p)
    degen = np.zeros(p, dtype=bool)
    for j in range(p):
        x = xt[j]
        a = np.abs(x[:, None] - x[None, :])
        arow = a.sum(axis=1)
        atot = arow.sum()
        v2xy = float(np.sum(a * b)) / n**2 - 2.0 * (arow @ brow) / n**3 + atot * btot / n**4
        v2xx = float(np.sum(a * a)) / n**2 - 2.0 * (arow @ arow) / n**3 + (atot / n**2) ** 2
        if v2xx <= 0.0 or v2yy <= 0.0:
            degen[j] = True
        else:
            out[j] = max(v2xy, 0.0) / np.sqrt(v2xx * v2yy)
    return out, degen


def mmle_fit_cells(counts, scores, kcounts, max_iter, tol, cap):
    """Marginal logistic slope per feature by Newton iteration on cell counts.

    Fitting y ~ intercept + score(x) maximizing the Bernoulli likelihood;
    duplicated covariate patterns are collapsed into weighted cells, which
    leaves the Newton iterates unchanged.

    Returns (|slope| (p,), status (p,) uint8) with status 0 = converged,
    1 = degenerate feature (zero variance), 2 = flagged (slope beyond the
    separation threshold ``cap`` or no convergence).  The reported value is
    the final finite iterate, not a clamp: separated features must keep
    distinct magnitudes or the ranking would collapse into index-ordered
    ties, which no real optimizer produces.
    """
    p = counts.shape[0]
    beta_abs = np.zeros(p)
    status = np.zeros(p, dtype=np.uint8)
    for j in range(p):
        kj = kcounts[j]
        c = counts[j, :kj, :]
        v = scores[j, :kj]
        nk = c.sum(axis=1)
        n = nk.sum()
        meanx = (nk @ v) / n
        varx = (nk @ (v - meanx) ** 2) / n
        if varx <= 0.0:
            status[j] = 1
            continue
        ybar = c[:, 1].sum() / n
        a = np.log(ybar / (1.0 - ybar))
        b = 0.0
        st = 2
        for _ in range(int(max_iter)):
            eta = a + b * v
            pk = 1.0 / (1.0 + np.exp(-eta))
            w = nk * pk * (1.0 - pk)
            r = c[:, 1] - nk * pk
            g0 = r.sum()
            g1 = v @ r
            h00 = w.sum()
            h01 = v @ w
            h11 = (v * v) @ w
            det = h00 * h11 - h01 * h01
            if det <= 1e-12 or not np.isfinite(det):
                break
            da = (h11 * g0 - h01 * g1) / det
            db = (-h01 * g0 + h00 * g1) / det
            if not (np.isfinite(da) and np.isfinite(db)):
                break
            a += da
            b += db
            if max(abs(da), abs(db)) < tol:
                st = 0
                break
        beta_abs[j] = abs(b)
        if st != 0 or abs(b) > cap:
            status[j] = 2
    return beta_abs, status


def _sigmoid(eta):
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _kkt_residual(x, y, eta, beta, lam, alpha, pf):
    n = y.size
    mu = _sigmoid(eta)
    grad = -(x.T @ (y - mu)) / n
    worst = abs(float(np.mean(y - mu)))
    for j in range(beta.size):
        l1 = lam * alpha * pf[j]
        l2 = lam * (1.0 - alpha) * pf[j]
        if beta[j] == 0.0:
            r = abs(grad[j]) - l1
            if r > worst:
                worst = r
        else:
            r = abs(grad[j] + l2 * beta[j] + l1 * np.sign(beta[j]))
            if r > worst:
                worst = r
    return worst


def enet_path(x, y, lambdas, alpha, pf, kkt_eps, max_outer, max_cd):
    """Elastic-net penalized logistic regression along a lambda path.

    x : (n, p) standardized design (no intercept column), y : (n,) in {0,1},
    lambdas : descending path, pf : per-feature penalty factors.
    Outer loop re-forms the weighted quadratic model, inner loop is cyclic
    coordinate descent with soft thresholding; warm starts along the path.

    Returns (intercepts (L,), coefs (L, p), kkt (L,), outer_iters (L,)).
    """
    n, p = x.shape
    nl = lambdas.size
    b0s = np.zeros(nl)
    betas = np.zeros((nl, p))
    kkts = np.zeros(nl)
    iters = np.zeros(nl, dtype=np.int64)
    ybar = float(np.mean(y))
    ybar = min(max(ybar, _PMIN), 1.0 - _PMIN)
    b0 = float(np.log(ybar / (1.0 - ybar)))
    beta = np.zeros(p)
    eta = b0 + x @ beta
    for li in range(nl):
        lam = lambdas[li]
        it = 0
        for it in range(1, int(max_outer) + 1):
            mu = _sigmoid(eta)
            w = np.maximum(mu * (1.0 - mu), _WMIN)
            r = (y - mu) / w
            wx2 = (w @ (x * x)) / n
            wsum = w.sum()
            for _ in range(int(max_cd)):
                dmax = 0.0
                d0 = float(w @ r) / wsum
                if d0 != 0.0:
                    b0 += d0
                    r -= d0
                    dmax = abs(d0)
                for j in range(p):
                    bj = beta[j]
                    rho = float((w * x[:, j]) @ r) / n + wx2[j] * bj
                    thr = lam * alpha * pf[j]
                    if abs(rho) <= thr:
                        bjn = 0.0
                    else:
                        z = rho - thr if rho > 0 else rho + thr
                        bjn = z / (wx2[j] + lam * (1.0 - alpha) * pf[j])
                    d = bjn - bj
                    if d != 0.0:
                        beta[j] = bjn
                        r -= d * x[:, j]
                        ad = abs(d)
                        if ad > dmax:
                            dmax = ad
                if dmax < 1e-12:
                    break
            eta = b0 + x @ beta
            kkt = _kkt_residual(x, y, eta, beta, lam, alpha, pf)
            if kkt <= kkt_eps * 1e-2:
                break
        b0s[li] = b0
        betas[li] = beta
        kkts[li] = _kkt_residual(x, y, eta, beta, lam, alpha, pf)
        iters[li] = it
    return b0s, betas, kkts, iters
