"""Extremal solvers on Z_m (DFT-diagonalized LP) and on Z with a support window (Gram SDP)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .anglesweep import SweepConfig, maximize_over_angles
from .groups import CyclicTrace
from .linalg import LPProblem, lp_solve
from .solver import ADMMConfig, admm_affine_psd


def dft(phi):
    """phi_hat(r) = sum_n phi(n) exp(-2 pi i n r / m); real for Hermitian-symmetric phi."""
    return np.fft.fft(np.asarray(phi, dtype=complex))


def idft(phi_hat):
    return np.fft.ifft(np.asarray(phi_hat, dtype=complex))


@dataclass
class CyclicProblem:
    """Extremal instance in coefficient form.

    ``mode`` is "modular" (size = modulus m, support = residues) or "integer"
    (size = window radius N, support = offsets in [-N, N]).
    """

    mode: str
    size: int
    support: list
    field: str = "complex"
    nu: int = 1


@dataclass
class CyclicSolution:
    value: float
    witness: np.ndarray
    method: str
    mode: str
    sweep_angle: float = 0.0
    binding_constraints: list = field(default_factory=list)
    gram: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "value": self.value,
            "witness": [[float(z.real), float(z.imag)] for z in np.asarray(self.witness, dtype=complex)],
            "method": self.method,
            "mode": self.mode,
            "sweep_angle": self.sweep_angle,
            "binding_constraints": [int(b) if isinstance(b, (int, np.integer)) else float(b) for b in self.binding_constraints],
            "diagnostics": self.diagnostics,
        }


def as_trace(m, support):
    """Normalize residue lists or CyclicTrace to a validated symmetric trace."""
    if isinstance(support, CyclicTrace):
        trace = support
        if trace.m != m:
            raise ValueError("trace modulus does not match m")
    else:
        trace = CyclicTrace.from_residues(m, support)
    if 0 not in trace:
        raise ValueError("support must contain 0")
    if not trace.is_symmetric:
        raise ValueError("support must be symmetric mod m")
    return trace


def _delta_solution(m, method, mode):
    w = np.zeros(m, dtype=complex)
    w[0] = 1.0
    return CyclicSolution(0.0, w, method, mode)


def _unit_solution(m, method, mode):
    w = np.zeros(m, dtype=complex)
    w[0] = 1.0
    return CyclicSolution(1.0, w, method, mode)


def _fold(n, m):
    return min(n % m, (-n) % m)


# -- modular problems -------------------------------------------------------------


def _cosine_weight(k, r, m):
    # folded class k contributes twice unless it is self-paired (k = m/2)
    if 2 * k == m:
        return np.cos(2.0 * np.pi * k * r / m)
    return 2.0 * np.cos(2.0 * np.pi * k * r / m)


def solve_K_m(m, support, nu=1):
    """Maximum |phi(nu)| over real pd functions on Z_m supported in H, phi(0)=1.

    Real even coefficients are folded to classes 1..floor(m/2); nonnegativity
    of the cosine transform at r = 0..floor(m/2) is the full pd constraint.
    Both signed objectives are solved and the larger magnitude wins.
    """
    trace = as_trace(m, support)
    nu = nu % m
    if nu == 0:
        return _unit_solution(m, "lp", "modular")
    if nu not in trace:
        return _delta_solution(m, "lp", "modular")
    half = m // 2
    ks = [k for k in range(1, half + 1) if k in trace]
    pos = {k: i for i, k in enumerate(ks)}
    rows = []
    for r in range(half + 1):
        coeffs = np.array([_cosine_weight(k, r, m) for k in ks])
        rows.append((coeffs, ">=", -1.0))

    nu_f = _fold(nu, m)
    best = None
    best_angle = 0.0
    for sign, angle in ((1.0, 0.0), (-1.0, np.pi)):
        obj = np.zeros(len(ks))
        obj[pos[nu_f]] = sign
        sol = lp_solve(LPProblem(obj, rows))
        if sol.status != "optimal":  # pragma: no cover - these LPs are always bounded
            raise RuntimeError(f"K_m LP terminated with status {sol.status}")
        if best is None or sol.value > best[0]:
            best = (sol.value, sol.x)
            best_angle = angle

    coeff = best[1]
    witness = np.ones(m, dtype=complex)
    for n in range(1, m):
        witness[n] = coeff[pos[_fold(n, m)]] if _fold(n, m) in pos else 0.0
    transform = dft(witness).real
    binding = [int(r) for r in range(m) if transform[r] <= 1e-8 * max(1.0, transform.max())]
    return CyclicSolution(
        value=float(abs(witness[nu])),
        witness=witness,
        method="lp",
        mode="modular",
        sweep_angle=best_angle,
        binding_constraints=binding,
    )


def solve_CF_m(m, support, nu=1, sweep=SweepConfig()):
    """Maximum |phi(nu)| over complex pd functions on Z_m supported in H, phi(0)=1.

    Hermitian symmetry leaves one complex coefficient per folded class; each
    objective angle theta gives the LP max of Re(exp(-i theta) phi(nu)), and
    the support-function maximum over theta is the modulus optimum.
    """
    trace = as_trace(m, support)
    nu = nu % m
    if nu == 0:
        return _unit_solution(m, "lp", "modular")
    if nu not in trace:
        return _delta_solution(m, "lp", "modular")
    half = m // 2
    ks_pair = [k for k in range(1, half + 1) if 2 * k != m and k in trace]
    has_self = (m % 2 == 0) and (half in trace)
    npair = len(ks_pair)
    pos = {k: i for i, k in enumerate(ks_pair)}
    nvar = 2 * npair + (1 if has_self else 0)

    rows = []
    for r in range(m):
        coeffs = np.zeros(nvar)
        for k in ks_pair:
            coeffs[pos[k]] = 2.0 * np.cos(2.0 * np.pi * k * r / m)
            coeffs[npair + pos[k]] = 2.0 * np.sin(2.0 * np.pi * k * r / m)
        if has_self:
            coeffs[-1] = 1.0 if r % 2 == 0 else -1.0
        rows.append((coeffs, ">=", -1.0))

    nu_f = _fold(nu, m)
    self_target = has_self and nu_f == half

    cache = {}

    def run(theta):
        obj = np.zeros(nvar)
        if self_target:
            obj[-1] = np.cos(theta)
        else:
            obj[pos[nu_f]] = np.cos(theta)
            obj[npair + pos[nu_f]] = np.sin(theta)
        sol = lp_solve(LPProblem(obj, rows))
        if sol.status != "optimal":  # pragma: no cover
            raise RuntimeError(f"CF_m LP terminated with status {sol.status}")
        cache[theta] = sol.x
        return sol.value

    if self_target:
        vals = [run(0.0), run(np.pi)]
        best_th = 0.0 if vals[0] >= vals[1] else np.pi
    else:
        _, best_th = maximize_over_angles(run, sweep)

    x = cache[best_th]
    witness = np.zeros(m, dtype=complex)
    witness[0] = 1.0
    for k in ks_pair:
        witness[k] = x[pos[k]] + 1j * x[npair + pos[k]]
        witness[m - k] = np.conj(witness[k])
    if has_self:
        witness[half] = x[-1]
    transform = dft(witness).real
    binding = [int(r) for r in range(m) if transform[r] <= 1e-8 * max(1.0, transform.max())]
    return CyclicSolution(
        value=float(abs(witness[nu])),
        witness=witness,
        method="lp",
        mode="modular",
        sweep_angle=float(best_th),
        binding_constraints=binding,
    )


# -- windowed problems on Z --------------------------------------------------------


def _window_support(window, support):
    members = np.zeros(window + 1, dtype=bool)
    offs = set(int(n) for n in support)
    for n in offs:
        if abs(n) > window:
            raise ValueError("support offset outside the window")
        if -n not in offs:
            raise ValueError("support must be symmetric")
        members[abs(n)] = True
    if not members[0]:
        raise ValueError("support must contain 0")
    return members


def _window_projector(dim, members, real_field):
    rows = [np.arange(dim - n) for n in range(dim)]

    def project(mat):
        out = 0.5 * (mat + mat.conj().T)
        if real_field:
            out = out.real
        out = np.array(out)
        d0 = out[rows[0], rows[0]]
        out[rows[0], rows[0]] = d0.real + (1.0 - d0.real.sum()) / dim
        for n in range(1, dim):
            if members[n]:
                continue
            rr = rows[n]
            cc = rr + n
            adj = -out[rr, cc].sum() / (dim - n)
            out[rr, cc] += adj
            out[cc, rr] += np.conj(adj)
        return out

    return project


def _window_objective(dim, nu, theta, real_field):
    c = np.zeros((dim, dim), dtype=complex)
    w = np.exp(1j * theta) / 2.0
    rr = np.arange(dim - nu)
    c[rr, rr + nu] += w
    c[rr + nu, rr] += np.conj(w)
    return c.real if real_field else c


def _diagonal_sums(mat, window):
    dim = window + 1
    phi = np.zeros(2 * window + 1, dtype=complex)
    for n in range(dim):
        rr = np.arange(dim - n)
        s = mat[rr, rr + n].sum()
        phi[window + n] = s
        phi[window - n] = np.conj(s)
    phi[window] = mat.trace().real
    return phi


def solve_CF_Z(window, support, nu=1, field="complex", admm=ADMMConfig(), sweep=SweepConfig()):
    """Maximum |phi(nu)| over pd sequences on Z supported in H inside [-N, N].

    Positive definiteness of a windowed sequence is equivalent to phi(n) being
    the n-th diagonal sum of some (N+1)x(N+1) PSD Gram matrix (spectral
    factorization both ways), so the problem is an SDP solved by alternating
    projections with a dual update.  The returned witness is nudged by a
    delta-shift so its Gram certificate is PSD outright.
    """
    window = int(window)
    if window < 0:
        raise ValueError("window radius must be nonnegative")
    members = _window_support(window, support)
    nu = abs(int(nu))
    if nu > window or not members[nu]:
        w = np.zeros(2 * window + 1, dtype=complex)
        w[window] = 1.0
        return CyclicSolution(0.0, w, "sos_sdp", "integer")
    if nu == 0:
        w = np.zeros(2 * window + 1, dtype=complex)
        w[window] = 1.0
        return CyclicSolution(1.0, w, "sos_sdp", "integer", gram=np.eye(window + 1) / (window + 1.0))

    dim = window + 1
    real_field = field == "real"
    project = _window_projector(dim, members, real_field)
    cache = {}

    def run(theta):
        cmat = _window_objective(dim, nu, theta, real_field)
        x, _, state, diag = admm_affine_psd(cmat, project, admm, state=cache.get("state"))
        cache["state"] = state
        cache[theta] = (x, diag)
        phi = _diagonal_sums(x, window)
        return float(np.real(np.exp(-1j * theta) * phi[window + nu]))

    if real_field:
        vals = [run(0.0), run(np.pi)]
        best_th = 0.0 if vals[0] >= vals[1] else np.pi
    else:
        _, best_th = maximize_over_angles(run, sweep)

    x, diag = cache[best_th]
    evals = np.linalg.eigvalsh(0.5 * (x + x.conj().T))
    lam_min = float(evals[0])
    eps = 0.0
    if lam_min < 0.0:
        eps = dim * (-lam_min) * (1.0 + 1e-6) + 1e-15
    gram = (x + (eps / dim) * np.eye(dim)) / (1.0 + eps)
    phi = _diagonal_sums(gram, window)
    phi[window] = 1.0

    t_grid = np.arange(4096) / 4096.0
    offsets = np.arange(-window, window + 1)
    transform = np.real(np.exp(2j * np.pi * np.outer(t_grid, offsets)) @ phi)
    binding = [float(t_grid[i]) for i in range(len(t_grid)) if transform[i] <= 1e-6 * max(1.0, transform.max())]
    return CyclicSolution(
        value=float(abs(phi[window + nu])),
        witness=phi,
        method="sos_sdp",
        mode="integer",
        sweep_angle=float(best_th),
        binding_constraints=binding[:32],
        gram=gram,
        diagnostics=diag,
    )


def solve_cyclic(problem):
    """Dispatch a CyclicProblem to the matching solver."""
    if problem.mode == "modular":
        if problem.field == "real":
            return solve_K_m(problem.size, problem.support, problem.nu)
        return solve_CF_m(problem.size, problem.support, problem.nu)
    if problem.mode == "integer":
        return solve_CF_Z(problem.size, problem.support, problem.nu, field=problem.field)
    raise ValueError(f"unknown mode {problem.mode!r}")


# -- identities between the constants ----------------------------------------------


def M_from_K(k_value):
    """Cosine-polynomial normalization: the M constant is twice the K constant."""
    return 2.0 * float(k_value)


@dataclass
class RealPdReport:
    m: int
    support: list
    cf_value: float
    k_value: float
    sandwich_lower_ok: bool
    sandwich_upper_ok: bool
    window_radius: int | None
    embedding_ok: bool | None
    embedding_reference: float | None

    @property
    def passed(self):
        ok = self.sandwich_lower_ok and self.sandwich_upper_ok
        if self.embedding_ok is not None:
            ok = ok and self.embedding_ok
        return ok


def verify_prop_realpd(m, support, tol=1e-6):
    """Check cos(pi/m) * CF_m <= K_m <= CF_m, and M_m >= M on window traces."""
    trace = as_trace(m, support)
    cf = solve_CF_m(m, trace)
    km = solve_K_m(m, trace)
    lower_ok = np.cos(np.pi / m) * cf.value <= km.value + tol
    upper_ok = km.value <= cf.value + tol

    radius = _window_radius(trace)
    embedding_ok = None
    reference = None
    if radius is not None and radius >= 1:
        reference = float(np.cos(np.pi / (radius + 2)))
        embedding_ok = M_from_K(km.value) >= M_from_K(reference) - tol
    return RealPdReport(
        m=m,
        support=trace.residues(),
        cf_value=cf.value,
        k_value=km.value,
        sandwich_lower_ok=bool(lower_ok),
        sandwich_upper_ok=bool(upper_ok),
        window_radius=radius,
        embedding_ok=embedding_ok,
        embedding_reference=reference,
    )


def _window_radius(trace):
    """Radius N when the trace is exactly {-N..N} mod m and proper, else None."""
    m = trace.m
    n = 0
    while n < m // 2 and (n + 1) in trace and (-(n + 1)) in trace:
        n += 1
    expected = np.zeros(m, dtype=bool)
    for k in range(-n, n + 1):
        expected[k % m] = True
    if np.array_equal(expected, trace.members) and 2 * n + 1 <= m:
        return n
    return None
