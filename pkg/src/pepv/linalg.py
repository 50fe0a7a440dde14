"""Self-contained complex dense linear algebra.

Everything the solver needs on small dense matrices: LU solves with partial
pivoting, a one-sided Jacobi SVD, a nonsymmetric eigensolver (balancing,
Householder Hessenberg reduction, explicit single-shift QR with Wilkinson
shifts, inverse iteration for eigenvectors) and univariate polynomial roots
via the companion matrix.

numpy is used as the array container only; no ``numpy.linalg``/LAPACK calls.
Matrices here are at most a few hundred rows, so O(k^3) dense algorithms with
vectorized inner loops are fast enough, and every routine is deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence, Singular, ValidationError, ZeroLeadingCoefficient
from .rng import SplitMix64

_EPS = float(np.finfo(np.float64).eps)

# Relative pivot tolerance: a pivot this far below its row's original
# magnitude is treated as an exact zero.
PIVOT_RTOL = 1e-14


def _as_cmatrix(a):
    m = np.array(a, dtype=np.complex128, copy=True, order="C")
    if m.ndim != 2:
        raise ValidationError(f"expected a matrix, got array of ndim {m.ndim}")
    if m.size and not np.isfinite(m.view(np.float64)).all():
        raise ValidationError("matrix contains non-finite entries")
    return m


# ---------------------------------------------------------------------------
# LU with partial pivoting


def lu_factor(A):
    """Factor PA = LU in place.  Returns (LU, swaps, row_scale_permuted)."""
    lu = _as_cmatrix(A)
    n, m = lu.shape
    if n != m:
        raise ValidationError("lu_factor needs a square matrix")
    scale = np.max(np.abs(lu), axis=1) if n else np.zeros(0)
    swaps = []
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= PIVOT_RTOL * scale[p]:
            raise Singular(k)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            scale[[k, p]] = scale[[p, k]]
            swaps.append((k, p))
        lu[k + 1:, k] /= lu[k, k]
        if k + 1 < n:
            lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, swaps, scale


def lu_solve_factored(lu, swaps, B):
    n = lu.shape[0]
    x = np.array(B, dtype=np.complex128, copy=True)
    vector = x.ndim == 1
    if vector:
        x = x[:, None]
    if x.shape[0] != n:
        raise ValidationError("right-hand side has wrong row count")
    for k, p in swaps:
        x[[k, p]] = x[[p, k]]
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu[i, i]
    return x[:, 0] if vector else x


def lu_solve(A, B):
    """Solve AX = B by partial-pivoted LU.  Raises Singular on tiny pivots."""
    lu, swaps, _ = lu_factor(A)
    return lu_solve_factored(lu, swaps, B)


def det(A):
    """Determinant via LU; exactly-singular matrices return 0."""
    try:
        lu, swaps, _ = lu_factor(A)
    except Singular:
        return 0.0 + 0.0j
    sign = -1.0 if len(swaps) % 2 else 1.0
    return sign * np.prod(np.diag(lu))


# ---------------------------------------------------------------------------
# Householder QR (used for random unitaries and orthonormal completions)


def _householder_vector(x):
    """Unit vector v with (I - 2 v v^H) x = alpha e_1, |alpha| = ||x||."""
    norm = np.sqrt(np.vdot(x, x).real)
    if norm == 0.0:
        return None, 0.0 + 0.0j
    phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0 + 0.0j
    alpha = -phase * norm
    v = x.copy()
    v[0] -= alpha
    vnorm = np.sqrt(np.vdot(v, v).real)
    if vnorm == 0.0:
        return None, alpha
    return v / vnorm, alpha


def qr(A):
    """Householder QR: A = QR with Q unitary (square) and R upper triangular."""
    R = _as_cmatrix(A)
    m, n = R.shape
    Q = np.eye(m, dtype=np.complex128)
    for k in range(min(m, n)):
        v, _ = _householder_vector(R[k:, k])
        if v is None:
            continue
        R[k:, k:] -= 2.0 * np.outer(v, v.conj() @ R[k:, k:])
        Q[:, k:] -= 2.0 * np.outer(Q[:, k:] @ v, v.conj())
    for k in range(min(m, n)):
        R[k + 1:, k] = 0.0
    return Q, R


def random_unitary(k, rng: SplitMix64):
    """Haar-ish random unitary from QR of a complex Gaussian matrix."""
    g = np.array(
        [[rng.complex_normal() for _ in range(k)] for _ in range(k)],
        dtype=np.complex128,
    )
    Q, R = qr(g)
    d = np.diag(R).copy()
    d[d == 0] = 1.0
    return Q * (d / np.abs(d)).conj()


# ---------------------------------------------------------------------------
# Balancing and Hessenberg reduction


def _balance(A):
    """Parlett-Reinsch balancing with powers of two.  Returns (B, d) with
    B = D^-1 A D and D = diag(d)."""
    B = A.copy()
    n = B.shape[0]
    d = np.ones(n)
    radix = 2.0
    for _ in range(100):
        converged = True
        for i in range(n):
            c = np.sum(np.abs(B[:, i])) - abs(B[i, i])
            r = np.sum(np.abs(B[i, :])) - abs(B[i, i])
            if c == 0.0 or r == 0.0:
                continue
            f = 1.0
            s = c + r
            while c < r / radix:
                c *= radix
                r /= radix
                f *= radix
            while c >= r * radix:
                c /= radix
                r *= radix
                f /= radix
            if (c + r) < 0.95 * s:
                converged = False
                d[i] *= f
                B[:, i] *= f
                B[i, :] /= f
        if converged:
            break
    return B, d


def hessenberg(A, accumulate=True):
    """Reduce to upper Hessenberg form: A = Q H Q^H."""
    H = A.copy()
    n = H.shape[0]
    Q = np.eye(n, dtype=np.complex128) if accumulate else None
    for k in range(n - 2):
        v, _ = _householder_vector(H[k + 1:, k])
        if v is None:
            continue
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        if accumulate:
            Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
    for k in range(n - 2):
        H[k + 2:, k] = 0.0
    return H, Q


# ---------------------------------------------------------------------------
# Eigenvalues: explicit single-shift QR on the Hessenberg form


def _eig2x2(a, b, c, d):
    tr2 = 0.5 * (a + d)
    disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c + 0.0j)
    return tr2 + disc, tr2 - disc


def _wilkinson_shift(H, hi):
    a, b = H[hi - 1, hi - 1], H[hi - 1, hi]
    c, d = H[hi, hi - 1], H[hi, hi]
    l1, l2 = _eig2x2(a, b, c, d)
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def _givens(a, b):
    """Unitary [[c, s], [-conj(s), conj(c)]] mapping (a, b) to (r, 0)."""
    r = np.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0 + 0.0j, 0.0 + 0.0j
    return np.conj(a) / r, np.conj(b) / r


def _qr_step(H, lo, hi, mu):
    """One explicit shifted QR sweep on the active block H[lo:hi+1, lo:hi+1]."""
    idx = np.arange(lo, hi + 1)
    H[idx, idx] -= mu
    rots = []
    for k in range(lo, hi):
        c, s = _givens(H[k, k], H[k + 1, k])
        rots.append((c, s))
        block = H[k:k + 2, k:hi + 1]
        top = c * block[0] + s * block[1]
        bot = -np.conj(s) * block[0] + np.conj(c) * block[1]
        block[0], block[1] = top, bot
    for k in range(lo, hi):
        c, s = rots[k - lo]
        cols = H[lo:min(k + 2, hi) + 1, k:k + 2]
        left = cols[:, 0] * np.conj(c) + cols[:, 1] * np.conj(s)
        right = -cols[:, 0] * s + cols[:, 1] * c
        cols[:, 0], cols[:, 1] = left, right
    H[idx, idx] += mu


def _subdiag_negligible(H, k, hnorm):
    thr = _EPS * (abs(H[k, k]) + abs(H[k + 1, k + 1]))
    if thr == 0.0:
        thr = _EPS * hnorm
    return abs(H[k + 1, k]) <= thr


def _qr_values(H, rng, max_total=None):
    """All eigenvalues of an upper Hessenberg matrix (values only)."""
    n = H.shape[0]
    hnorm = max(float(np.max(np.abs(H))), 1.0)
    vals = []
    hi = n - 1
    stagnant = 0
    restarts = 0
    total = 0
    cap = max_total if max_total is not None else 80 * max(n, 1)
    while hi >= 0:
        for k in range(hi - 1, -1, -1):
            if _subdiag_negligible(H, k, hnorm):
                H[k + 1, k] = 0.0
        if hi == 0 or H[hi, hi - 1] == 0.0:
            vals.append(H[hi, hi])
            hi -= 1
            stagnant = 0
            continue
        if hi >= 1 and (hi - 1 == 0 or H[hi - 1, hi - 2] == 0.0):
            l1, l2 = _eig2x2(H[hi - 1, hi - 1], H[hi - 1, hi],
                             H[hi, hi - 1], H[hi, hi])
            vals.extend([l1, l2])
            hi -= 2
            stagnant = 0
            continue
        lo = hi - 1
        while lo > 0 and H[lo, lo - 1] != 0.0:
            lo -= 1
        total += 1
        stagnant += 1
        if total > cap:
            exc = NoConvergence("eig", cap)
            exc.partial = np.array(vals)
            raise exc
        if stagnant > 30:
            # Random unitary similarity restart on the stuck block.
            b = hi - lo + 1
            U = random_unitary(b, rng)
            blk = U.conj().T @ H[lo:hi + 1, lo:hi + 1] @ U
            H[lo:hi + 1, lo:hi + 1], _ = hessenberg(blk, accumulate=False)
            stagnant = 0
            restarts += 1
            if restarts > 5:
                exc = NoConvergence("eig", total)
                exc.partial = np.array(vals)
                raise exc
            continue
        if stagnant % 10 == 0:
            mu = H[hi, hi] + abs(H[hi, hi - 1]) * (rng.uniform() - 0.5)
        else:
            mu = _wilkinson_shift(H, hi)
        _qr_step(H, lo, hi, mu)
    return np.array(vals[::-1])


# ---------------------------------------------------------------------------
# Eigenvectors: inverse iteration on the Hessenberg form


def _hessenberg_solve(H, lam, b, tiny):
    """Solve (H - lam I) x = b for upper Hessenberg H, adjacent-row pivoting."""
    n = H.shape[0]
    M = H.copy()
    idx = np.arange(n)
    M[idx, idx] -= lam
    x = b.copy()
    for k in range(n - 1):
        if abs(M[k + 1, k]) > abs(M[k, k]):
            M[[k, k + 1], k:] = M[[k + 1, k], k:]
            x[[k, k + 1]] = x[[k + 1, k]]
        if M[k, k] == 0.0:
            M[k, k] = tiny
        f = M[k + 1, k] / M[k, k]
        M[k + 1, k:] -= f * M[k, k:]
        x[k + 1] -= f * x[k]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= M[i, i + 1:] @ x[i + 1:]
        if M[i, i] == 0.0:
            M[i, i] = tiny
        x[i] /= M[i, i]
    return x


def _hessenberg_vectors(H, vals, rng):
    """Eigenvectors of H by inverse iteration, one per eigenvalue."""
    n = H.shape[0]
    hnorm = max(float(np.max(np.abs(H))), 1.0)
    tiny = _EPS * hnorm
    vecs = np.zeros((n, len(vals)), dtype=np.complex128)
    for j, lam in enumerate(vals):
        # Perturb repeated shifts so inverse iteration can separate clusters.
        close = [i for i in range(j) if abs(vals[i] - lam) <= 1e-8 * hnorm]
        shift = lam + len(close) * 3.0 * tiny
        v = np.array([rng.complex_normal() for _ in range(n)])
        v /= np.sqrt(np.vdot(v, v).real)
        best, best_res = v, np.inf
        for attempt in range(5):
            for _ in range(3):
                w = _hessenberg_solve(H, shift, v, tiny)
                for i in close:
                    w -= np.vdot(vecs[:, i], w) * vecs[:, i]
                nw = np.sqrt(np.vdot(w, w).real)
                if nw == 0.0 or not np.isfinite(nw):
                    break
                v = w / nw
                res = float(np.sqrt(np.vdot(H @ v - lam * v,
                                            H @ v - lam * v).real))
                if res < best_res:
                    best, best_res = v.copy(), res
                if res <= 1e-12 * hnorm:
                    break
            if best_res <= 1e-11 * hnorm:
                break
            shift = lam + (attempt + 1) * 7.0 * tiny
            v = np.array([rng.complex_normal() for _ in range(n)])
            v /= np.sqrt(np.vdot(v, v).real)
        vecs[:, j] = best
    return vecs


def eig_dense(A, compute_vectors=True, seed=0x51CA):
    """Eigendecomposition of a small dense complex matrix.

    Returns (values, vectors) with vectors as unit columns satisfying
    ``A v = lambda v`` up to ~1e-10 * ||A||.  ``vectors`` is None when
    ``compute_vectors`` is False.  Deterministic for a fixed seed.
    """
    M = _as_cmatrix(A)
    n, m = M.shape
    if n != m:
        raise ValidationError("eig_dense needs a square matrix")
    if n == 0:
        return np.zeros(0, dtype=np.complex128), np.zeros((0, 0), np.complex128)
    if n == 1:
        return M[0, 0].reshape(1), np.ones((1, 1), dtype=np.complex128)
    rng = SplitMix64(seed)
    B, dscale = _balance(M)
    H, Q = hessenberg(B, accumulate=compute_vectors)
    vals = _qr_values(H.copy(), rng)
    if not compute_vectors:
        return vals, None
    VH = _hessenberg_vectors(H, vals, rng)
    V = dscale[:, None] * (Q @ VH)
    norms = np.sqrt(np.sum(np.abs(V) ** 2, axis=0))
    norms[norms == 0] = 1.0
    V /= norms
    # Fixed phase: largest entry of each column real positive.
    for j in range(V.shape[1]):
        k = int(np.argmax(np.abs(V[:, j])))
        piv = V[k, j]
        if piv != 0:
            V[:, j] *= np.conj(piv) / abs(piv)
    return vals, V


# ---------------------------------------------------------------------------
# SVD by one-sided Jacobi


def _jacobi_rotation(app, aqq, apq):
    """Unitary 2x2 J with J^H G J diagonal for G = [[app, apq], [~, aqq]]."""
    absq = abs(apq)
    phase = apq / absq
    tau = (aqq - app) / (2.0 * absq)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    return c, s, np.conj(phase)


def svd(A, max_sweeps=60):
    """One-sided Jacobi SVD: A = U diag(s) V^H, s nonincreasing.

    For an m x n input with m >= n, U is m x n and V is n x n with
    orthonormal columns; tall/wide inputs are handled by conjugation.
    """
    M = _as_cmatrix(A)
    m, n = M.shape
    if m < n:
        U, s, V = svd(M.conj().T, max_sweeps=max_sweeps)
        return V, s, U
    W = M.copy()
    V = np.eye(n, dtype=np.complex128)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                wp, wq = W[:, p], W[:, q]
                app = np.vdot(wp, wp).real
                aqq = np.vdot(wq, wq).real
                if app == 0.0 or aqq == 0.0:
                    continue
                apq = np.vdot(wp, wq)
                if abs(apq) <= 1e-15 * np.sqrt(app * aqq):
                    continue
                rotated = True
                c, s, ph = _jacobi_rotation(app, aqq, apq)
                new_p = c * wp - (s * ph) * wq
                new_q = s * wp + (c * ph) * wq
                W[:, p], W[:, q] = new_p, new_q
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - (s * ph) * vq
                V[:, q] = s * vp + (c * ph) * vq
        if not rotated:
            break
    else:
        raise NoConvergence("svd", max_sweeps)
    sig = np.sqrt(np.sum(np.abs(W) ** 2, axis=0))
    order = np.argsort(-sig, kind="stable")
    sig = sig[order]
    W = W[:, order]
    V = V[:, order]
    U = np.zeros((m, n), dtype=np.complex128)
    nonzero = sig > 0.0
    U[:, nonzero] = W[:, nonzero] / sig[nonzero]
    if not nonzero.all():
        U = _complete_orthonormal(U, nonzero)
    return U, sig, V


def _complete_orthonormal(U, have):
    """Fill the columns marked False in ``have`` with orthonormal vectors."""
    m = U.shape[0]
    basis = [U[:, j] for j in range(U.shape[1]) if have[j]]
    cand = 0
    for j in range(U.shape[1]):
        if have[j]:
            continue
        while cand < m:
            v = np.zeros(m, dtype=np.complex128)
            v[cand] = 1.0
            cand += 1
            for _ in range(2):
                for b in basis:
                    v -= np.vdot(b, v) * b
            norm = np.sqrt(np.vdot(v, v).real)
            if norm > 0.5:
                v /= norm
                U[:, j] = v
                basis.append(v)
                break
        else:
            raise NoConvergence("orthonormal completion", m)
    return U


# ---------------------------------------------------------------------------
# Polynomial roots via the companion matrix


def poly_roots(coeffs):
    """All roots of a univariate polynomial with ascending coefficients."""
    c = np.asarray(coeffs, dtype=np.complex128).ravel()
    if c.size < 2:
        raise ValidationError("poly_roots needs degree >= 1")
    if c[-1] == 0.0:
        raise ZeroLeadingCoefficient()
    monic = c[:-1] / c[-1]
    deg = monic.size
    if deg == 1:
        return np.array([-monic[0]])
    comp = np.zeros((deg, deg), dtype=np.complex128)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic
    vals, _ = eig_dense(comp, compute_vectors=False)
    return vals
