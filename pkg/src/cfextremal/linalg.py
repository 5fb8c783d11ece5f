"""Dense numerical kernels: Hermitian eigenproblems, PSD projection, LP, polynomial roots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_TOL = 1e-12


class EigenConvergenceError(RuntimeError):
    """Jacobi sweeps (or the LAPACK fallback) failed to converge."""


class PolyRootError(RuntimeError):
    """Aberth iteration failed to converge or residuals exceed tolerance."""


class SingularBasisError(RuntimeError):
    """Simplex basis is numerically singular even after refactorization."""


def hermitian_residual(mat):
    """Max entrywise deviation of M from its conjugate transpose."""
    m = np.asarray(mat)
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


def _offdiag_norm(a):
    b = a.copy()
    np.fill_diagonal(b, 0.0)
    return float(np.linalg.norm(b, "fro"))


def _jacobi_real_symmetric(a, max_sweeps=JACOBI_MAX_SWEEPS, off_tol=JACOBI_OFF_TOL):
    """Cyclic Jacobi on a real symmetric matrix; returns (eigenvalues, V) unsorted."""
    n = a.shape[0]
    v = np.eye(n)
    norm = np.linalg.norm(a, "fro")
    if norm == 0.0 or n == 1:
        return np.diag(a).copy(), v
    skip = off_tol * norm / (4.0 * n)
    for _ in range(max_sweeps):
        if _offdiag_norm(a) < off_tol * norm:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise EigenConvergenceError(
        f"Jacobi did not converge in {max_sweeps} sweeps; off-diagonal norm {_offdiag_norm(a):.3e}"
    )


def eigh(mat, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi.

    Complex input is embedded as the 2n x 2n real symmetric matrix
    [[Re M, -Im M], [Im M, Re M]], whose doubled spectrum is de-duplicated by
    averaging adjacent sorted pairs.  Returns eigenvalues ascending and a
    unitary matrix of column eigenvectors.
    """
    m = np.asarray(mat)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    n = m.shape[0]
    herm = 0.5 * (m + m.conj().T)
    if np.isrealobj(m) or np.abs(herm.imag).max() == 0.0:
        evals, evecs = _jacobi_real_symmetric(np.array(herm.real, dtype=float), max_sweeps)
        order = np.argsort(evals, kind="stable")
        return evals[order], evecs[:, order]

    a = np.array(herm.real, dtype=float)
    b = np.array(herm.imag, dtype=float)
    big = np.block([[a, -b], [b, a]])
    evals2, evecs2 = _jacobi_real_symmetric(big, max_sweeps)
    order = np.argsort(evals2, kind="stable")
    evals2 = evals2[order]
    evecs2 = evecs2[:, order]
    evals = 0.5 * (evals2[0::2] + evals2[1::2])

    # Real eigenvector (x; y) of the embedding maps to x + iy for M; each
    # doubled eigenspace yields its complex eigenspace under Gram-Schmidt.
    norm = max(np.linalg.norm(herm, "fro"), 1e-300)
    cluster_tol = max(1e-10 * norm, 1e-14)
    vectors = np.empty((n, n), dtype=complex)
    filled = 0
    i = 0
    while i < 2 * n:
        j = i
        while j + 1 < 2 * n and evals2[j + 1] - evals2[i] <= cluster_tol:
            j += 1
        cluster = [evecs2[:n, k] + 1j * evecs2[n:, k] for k in range(i, j + 1)]
        want = (j - i + 1) // 2
        got = _complex_gram_schmidt(cluster, want)
        for vcol in got:
            vectors[:, filled] = vcol
            filled += 1
        i = j + 1
    if filled != n:
        raise EigenConvergenceError("eigenvector extraction lost rank in a degenerate cluster")
    return evals, vectors


def _complex_gram_schmidt(candidates, want):
    accepted = []
    for threshold in (0.5, 1e-2, 1e-5, 1e-9):
        accepted = []
        for c in candidates:
            w = c.copy()
            for u in accepted:
                w -= np.vdot(u, w) * u
            nw = np.linalg.norm(w)
            if nw > threshold:
                accepted.append(w / nw)
            if len(accepted) == want:
                return accepted
        if len(accepted) >= want:
            return accepted[:want]
    return accepted[:want]


def psd_project(mat):
    """Nearest positive semidefinite matrix in Frobenius norm.

    Eigendecomposes the Hermitian part and clamps negative eigenvalues to
    zero.  Backed by LAPACK: the ADMM loops call this tens of thousands of
    times, where sweep-based Jacobi would dominate the runtime.
    """
    m = np.asarray(mat)
    herm = 0.5 * (m + m.conj().T)
    try:
        w, v = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise EigenConvergenceError(f"eigendecomposition failed: {exc}") from exc
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.conj().T
    return 0.5 * (out + out.conj().T)


# -- linear programming ---------------------------------------------------------


@dataclass
class LPProblem:
    """Maximize objective . x subject to rows (coeffs, relation, rhs).

    Relations are '<=', '>=' or '='.  Variables are free unless bounds
    (lo, hi) rows are given; None leaves a side unbounded.
    """

    objective: np.ndarray
    constraints: list
    bounds: list | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)


@dataclass
class LPSolution:
    value: float
    x: np.ndarray
    status: str


_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-9


def lp_solve(problem, tol=_PIVOT_TOL):
    """Two-phase dense simplex with Bland's anti-cycling rule.

    Free variables are split into positive parts; bound rows become explicit
    constraints.  Returns status 'optimal', 'infeasible' or 'unbounded'.
    """
    c_orig = problem.objective
    nvar = c_orig.shape[0]
    rows = [(np.asarray(a, dtype=float), rel, float(rhs)) for a, rel, rhs in problem.constraints]
    if problem.bounds is not None:
        for i, (lo, hi) in enumerate(problem.bounds):
            unit = np.zeros(nvar)
            unit[i] = 1.0
            if lo is not None:
                rows.append((unit, ">=", float(lo)))
            if hi is not None:
                rows.append((unit, "<=", float(hi)))

    m = len(rows)
    # split x = u - v, then slack/surplus per inequality row
    n_split = 2 * nvar
    slack_cols = sum(1 for _, rel, _ in rows if rel != "=")
    n_std = n_split + slack_cols
    a_std = np.zeros((m, n_std))
    b_std = np.zeros(m)
    s_at = n_split
    for i, (coeffs, rel, rhs) in enumerate(rows):
        a_std[i, 0:nvar] = coeffs
        a_std[i, nvar:n_split] = -coeffs
        b_std[i] = rhs
        if rel == "<=":
            a_std[i, s_at] = 1.0
            s_at += 1
        elif rel == ">=":
            a_std[i, s_at] = -1.0
            s_at += 1
        elif rel != "=":
            raise ValueError(f"unknown relation {rel!r}")
    flip = b_std < 0
    a_std[flip] *= -1.0
    b_std[flip] *= -1.0

    # phase 1: artificial basis
    tableau = np.hstack([a_std, np.eye(m)])
    basis = list(range(n_std, n_std + m))
    cost1 = np.zeros(n_std + m)
    cost1[n_std:] = 1.0
    b_work = b_std.copy()
    status = _bland_simplex(tableau, b_work, cost1, basis, tol)
    if status != "optimal":  # pragma: no cover - phase 1 is always bounded
        raise SingularBasisError("phase-1 simplex terminated abnormally")
    if float(b_work @ cost1[basis]) > 1e-7:
        return LPSolution(float("nan"), np.full(nvar, np.nan), "infeasible")
    _drive_out_artificials(tableau, b_work, basis, n_std, tol)

    # phase 2 on original columns
    keep = [i for i in range(m) if basis[i] < n_std or b_work[i] > 1e-9]
    tableau = tableau[keep][:, :n_std]
    b_work = b_work[keep]
    basis = [basis[i] for i in keep]
    cost2 = np.zeros(n_std)
    cost2[0:nvar] = -c_orig  # maximize c.x == minimize -c.x
    cost2[nvar:n_split] = c_orig
    status = _bland_simplex(tableau, b_work, cost2, basis, tol)
    if status == "unbounded":
        return LPSolution(float("inf"), np.full(nvar, np.nan), "unbounded")

    x_std = _refactorized_solution(a_std, b_std, basis, n_std)
    x = x_std[0:nvar] - x_std[nvar:n_split]
    residual = _constraint_violation(rows, x)
    if residual > 1e-10:
        raise SingularBasisError(f"constraint violation {residual:.3e} after refactorization")
    return LPSolution(float(c_orig @ x), x, "optimal")


def _bland_simplex(a, b, cost, basis, tol):
    m, n = a.shape
    in_basis = np.zeros(n, dtype=bool)
    in_basis[basis] = True
    max_iter = 2000 * (m + n + 1)
    for _ in range(max_iter):
        reduced = cost - cost[basis] @ a
        enter = -1
        for j in range(n):
            if not in_basis[j] and reduced[j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        col = a[:, enter]
        leave = -1
        best = np.inf
        for i in range(m):
            if col[i] > tol:
                ratio = b[i] / col[i]
                if ratio < best - 1e-12 or (
                    abs(ratio - best) <= 1e-12 and (leave < 0 or basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(a, b, basis, in_basis, leave, enter)
    raise SingularBasisError("simplex iteration limit exceeded")


def _pivot(a, b, basis, in_basis, row, col):
    piv = a[row, col]
    a[row] /= piv
    b[row] /= piv
    for i in range(a.shape[0]):
        if i != row and a[i, col] != 0.0:
            f = a[i, col]
            a[i] -= f * a[row]
            b[i] -= f * b[row]
    in_basis[basis[row]] = False
    in_basis[col] = True
    basis[row] = col


def _drive_out_artificials(a, b, basis, n_std, tol):
    in_basis = np.zeros(a.shape[1], dtype=bool)
    in_basis[basis] = True
    for i in range(len(basis)):
        if basis[i] >= n_std:
            for j in range(n_std):
                if not in_basis[j] and abs(a[i, j]) > tol:
                    _pivot(a, b, basis, in_basis, i, j)
                    break


def _refactorized_solution(a_std, b_std, basis, n_std):
    """Recompute the basic solution from original data to shed pivot round-off."""
    bmat = a_std[:, basis]
    try:
        xb = np.linalg.solve(bmat, b_std)
    except np.linalg.LinAlgError:
        xb, *_ = np.linalg.lstsq(bmat, b_std, rcond=None)
        if np.linalg.norm(bmat @ xb - b_std) > 1e-8 * (1.0 + np.linalg.norm(b_std)):
            raise SingularBasisError("numerically singular basis") from None
    x_std = np.zeros(n_std)
    for value, var in zip(xb, basis):
        x_std[var] = value
    return x_std


def _constraint_violation(rows, x):
    worst = 0.0
    for coeffs, rel, rhs in rows:
        lhs = float(coeffs @ x)
        if rel == "<=":
            worst = max(worst, lhs - rhs)
        elif rel == ">=":
            worst = max(worst, rhs - lhs)
        else:
            worst = max(worst, abs(lhs - rhs))
    return worst


# -- polynomial roots ------------------------------------------------------------


def poly_roots(coeffs, max_iter=500):
    """All complex roots by Aberth-Ehrlich simultaneous iteration.

    ``coeffs[k]`` multiplies z^k.  Leading coefficients at or below 1e-12 of
    the largest magnitude are trimmed first.  Initial points sit on a
    deterministically phase-offset circle at the Cauchy bound.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("coefficient vector must be non-empty and one-dimensional")
    scale = np.abs(c).max()
    if scale == 0.0:
        raise ValueError("zero polynomial has no defined roots")
    deg = c.size - 1
    while deg > 0 and abs(c[deg]) <= 1e-12 * scale:
        deg -= 1
    if deg < 1:
        raise ValueError("degree must be at least 1 after trimming")
    c = c[: deg + 1]

    radius = 1.0 + np.abs(c[:-1] / c[-1]).max()
    angles = 2.0 * np.pi * np.arange(deg) / deg + 0.43
    z = 0.9 * radius * np.exp(1j * angles) * (1.0 + 0.05 * np.arange(deg) / max(deg, 1))

    dc = c[1:] * np.arange(1, deg + 1)
    for _ in range(max_iter):
        pz = _horner(c, z)
        dpz = _horner(dc, z)
        dpz = np.where(dpz == 0.0, 1e-300, dpz)
        newton = pz / dpz
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        sums = (1.0 / diff).sum(axis=1)
        denom = 1.0 - newton * sums
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        step = newton / denom
        z = z - step
        if np.abs(step).max() <= 1e-14 * (1.0 + np.abs(z).max()):
            break
    else:
        raise PolyRootError(f"Aberth iteration did not converge in {max_iter} steps")

    cnorm = np.linalg.norm(c)
    bounds = 1e-8 * cnorm * np.maximum(1.0, np.abs(z)) ** deg
    residuals = np.abs(_horner(c, z))
    if np.any(residuals > bounds):
        worst = float(residuals.max())
        raise PolyRootError(f"root residual {worst:.3e} exceeds tolerance")
    return z[np.lexsort((z.imag, z.real))]


def _horner(c, z):
    acc = np.full_like(z, c[-1])
    for k in range(c.size - 2, -1, -1):
        acc = acc * z + c[k]
    return acc
