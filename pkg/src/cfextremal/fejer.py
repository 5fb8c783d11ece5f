"""Convolution square roots on Z and Z_m, and the lift of cyclic witnesses into a group."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclic import dft, idft
from .groups import SubsetMask, element_order
from .linalg import PolyRootError, poly_roots
from .posdef import GroupFunction, is_posdef

UNIT_CIRCLE_TOL = 1e-6
TRANSFORM_GRID = 4096


class FactorizationError(ValueError):
    """Input is not positive definite or the root pairing is ambiguous."""


class TransferPreconditionError(ValueError):
    """A neighborhood condition (i)/(ii)/(iii) or the invariance premise failed."""


@dataclass(frozen=True)
class WindowedSequence:
    """Finitely supported sequence on Z, stored on the window [-N, N]."""

    window: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (2 * self.window + 1,):
            raise ValueError("values must have length 2*window + 1")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def value_at(self, n):
        if abs(n) > self.window:
            return 0.0 + 0.0j
        return complex(self.values[self.window + n])

    @property
    def hermitian_defect(self):
        return float(np.abs(self.values - np.conj(self.values[::-1])).max())

    def to_json(self):
        return {
            "window": self.window,
            "values": [[float(z.real), float(z.imag)] for z in self.values],
        }

    @classmethod
    def from_json(cls, obj):
        vals = [complex(re, im) for re, im in obj["values"]]
        return cls(int(obj["window"]), np.array(vals))


def one_sided_conv_square(theta):
    """psi = theta * theta~ for theta supported on [0, K]; returns a WindowedSequence."""
    th = np.asarray(theta, dtype=complex)
    k = th.size - 1
    vals = np.zeros(2 * k + 1, dtype=complex)
    for n in range(-k, k + 1):
        js = np.arange(max(n, 0), min(k, k + n) + 1)
        vals[k + n] = np.sum(th[js] * np.conj(th[js - n]))
    return WindowedSequence(k, vals)


def trig_poly_values(seq, grid=TRANSFORM_GRID):
    """T(t) = sum psi(n) exp(2 pi i n t) sampled on the uniform grid over [0, 1)."""
    t = np.arange(grid) / grid
    offsets = np.arange(-seq.window, seq.window + 1)
    return np.exp(2j * np.pi * np.outer(t, offsets)) @ seq.values


def factor_Z(seq, tol=1e-7):
    """One-sided spectral square root of a pd windowed sequence.

    Forms p(w) = sum psi(n) w^(n+N), whose roots pair as (r, 1/conj(r)) with
    unit-circle roots in even multiplicity; theta is rebuilt from the roots
    inside the circle plus half of each unit cluster, scaled to match psi(0)
    and phase-normalized so theta(0) >= 0.  Support sits in [0, N] by
    construction.
    """
    scale = max(abs(seq.value_at(0)), 1e-300)
    if seq.hermitian_defect > tol * scale:
        raise FactorizationError("not positive definite: sequence is not Hermitian-symmetric")
    tvals = trig_poly_values(seq)
    if tvals.real.min() < -tol * scale:
        raise FactorizationError(
            f"not positive definite: transform attains {tvals.real.min():.3e}"
        )

    vals = seq.values
    n_eff = seq.window
    while n_eff > 0 and abs(vals[seq.window + n_eff]) <= 1e-12 * scale:
        n_eff -= 1
    if n_eff == 0:
        theta = np.array([np.sqrt(max(vals[seq.window].real, 0.0))], dtype=complex)
        _check_reconstruction(theta, seq, 1e-6 * scale)
        return theta

    coeffs = vals[seq.window - n_eff : seq.window + n_eff + 1]
    roots = poly_roots(coeffs)
    selected = _select_half_roots(roots)
    if len(selected) != n_eff:
        raise FactorizationError(
            f"root pairing ambiguity: selected {len(selected)} of expected {n_eff} roots ({roots})"
        )
    q = np.array([1.0 + 0.0j])
    for r in selected:
        q = np.convolve(q, np.array([-r, 1.0]))
    norm = np.sqrt(scale / float(np.sum(np.abs(q) ** 2)))
    theta = norm * q
    if abs(theta[0]) > 0:
        theta = theta * (np.conj(theta[0]) / abs(theta[0]))
    _check_reconstruction(theta, seq, 1e-6 * scale)
    return theta


def _select_half_roots(roots):
    unit = [r for r in roots if abs(abs(r) - 1.0) <= UNIT_CIRCLE_TOL]
    rest = [r for r in roots if abs(abs(r) - 1.0) > UNIT_CIRCLE_TOL]

    selected = list(_halve_unit_clusters(unit))

    # greedy reciprocal pairing by |r * conj(r') - 1|, keeping the inner member
    rest.sort(key=lambda r: (abs(r), r.real, r.imag))
    used = [False] * len(rest)
    for i, r in enumerate(rest):
        if used[i]:
            continue
        used[i] = True
        best_j = -1
        best_metric = np.inf
        for j in range(i + 1, len(rest)):
            if used[j]:
                continue
            metric = abs(r * np.conj(rest[j]) - 1.0)
            if metric < best_metric:
                best_metric = metric
                best_j = j
        if best_j < 0 or best_metric > 1e-3 * max(1.0, abs(r)):
            raise FactorizationError(f"root pairing ambiguity: no reciprocal partner for {r}")
        used[best_j] = True
        inner = r if abs(r) <= abs(rest[best_j]) else rest[best_j]
        selected.append(inner)
    return selected


def _halve_unit_clusters(unit):
    if not unit:
        return []
    angles = sorted((float(np.angle(r)), r) for r in unit)
    clusters = []
    for ang, r in angles:
        if clusters and ang - clusters[-1][-1][0] <= 1e-5:
            clusters[-1].append((ang, r))
        else:
            clusters.append([(ang, r)])
    # wrap-around: merge first and last cluster across the -pi/pi seam
    if len(clusters) > 1:
        first_ang = clusters[0][0][0]
        last_ang = clusters[-1][-1][0]
        if (first_ang + 2.0 * np.pi) - last_ang <= 1e-5:
            clusters[0].extend(clusters.pop())
    out = []
    for cluster in clusters:
        if len(cluster) % 2 != 0:
            raise FactorizationError(
                f"root pairing ambiguity: odd unit-circle cluster {[r for _, r in cluster]}"
            )
        mean = np.mean([r / abs(r) for _, r in cluster])
        rep = mean / abs(mean)
        out.extend([rep] * (len(cluster) // 2))
    return out


def _check_reconstruction(theta, seq, bound):
    recon = one_sided_conv_square(theta)
    pad = seq.window - recon.window
    vals = np.pad(recon.values, (pad, pad)) if pad > 0 else recon.values
    err = float(np.abs(vals - seq.values).max())
    if err > bound:
        raise FactorizationError(f"reconstruction defect {err:.3e} exceeds {bound:.3e}")


def factor_Zm(psi, tol=1e-7):
    """Convolution square root on Z_m via the componentwise transform root.

    theta = IDFT(sqrt(max(DFT(psi), 0))); the support of theta is not
    controlled, unlike the windowed case.
    """
    vec = np.asarray(psi, dtype=complex)
    scale = max(abs(vec[0]), 1e-300)
    hat = dft(vec)
    if np.abs(hat.imag).max() > tol * scale * len(vec):
        raise FactorizationError("not positive definite on Z_m: transform is not real")
    if hat.real.min() < -tol * scale:
        raise FactorizationError(
            f"not positive definite on Z_m: transform attains {hat.real.min():.3e}"
        )
    theta = idft(np.sqrt(np.clip(hat.real, 0.0, None)).astype(complex))
    recon = cyclic_conv_square(theta)
    err = float(np.abs(recon - vec).max())
    if err > 1e-8 * scale:
        raise FactorizationError(f"reconstruction defect {err:.3e} exceeds {1e-8 * scale:.3e}")
    return theta


def cyclic_reversed(theta):
    m = len(theta)
    idx = (-np.arange(m)) % m
    return np.conj(np.asarray(theta, dtype=complex)[idx])


def cyclic_convolution(f, g):
    return idft(dft(f) * dft(g))


def cyclic_conv_square(theta):
    return cyclic_convolution(theta, cyclic_reversed(theta))


# -- transfer of cyclic witnesses into the ambient group ---------------------------


def conjugate_hull(group, umask, z):
    """U* = union over k of z^-k U z^k (k modulo the order of z)."""
    m = element_order(group, z)
    members = umask.members.copy()
    zk = group.identity
    for _ in range(1, m):
        zk = group.mul(zk, z)
        zk_inv = group.inv(zk)
        conj_idx = group.cayley[group.cayley[zk], zk_inv]  # x -> z^k x z^-k
        members |= umask.members[conj_idx]
    return SubsetMask(group.order, members)


@dataclass
class TransferReport:
    certificate: object
    support_ok: bool
    identity_defect: float
    target_defect: float
    value: float
    conditions: dict

    @property
    def all_ok(self):
        return (
            self.certificate.accepted
            and self.support_ok
            and self.identity_defect <= 1e-9
            and self.target_defect <= 1e-9
        )


def transfer_construct(group, z, psi, f, omega, tol=1e-9):
    """Lift a pd cyclic witness psi along <z>: F(x) = sum_n psi(n) f(z^-n x).

    Requires psi pd on Z_m with psi(0)=1, f pd and invariant under conjugation
    by z, and the support conditions on U = supp f: the conjugate hull U* must
    sit in omega, the translates z^n U* for n in supp psi must sit in omega,
    and no nonzero power z^n may fall in U*.  Then F is pd, supported in
    omega, with F(e) = f(e) and F(z) = psi(1) f(e); F/F(e) is a feasible
    witness attaining |psi(1)|.
    """
    m = element_order(group, z)
    vec = np.asarray(psi, dtype=complex)
    if vec.shape != (m,):
        raise TransferPreconditionError(f"psi must have length equal to the order {m} of z")
    if abs(vec[0] - 1.0) > 1e-9:
        raise TransferPreconditionError("psi(0) must equal 1")
    hat = dft(vec).real
    if hat.min() < -1e-7:
        raise TransferPreconditionError("psi is not positive definite on Z_m")

    cert_f = is_posdef(group, f, tol=1e-7)
    if not cert_f.accepted:
        raise TransferPreconditionError("f is not positive definite")
    scale = max(abs(f.values[group.identity]), 1e-300)
    conj_idx = group.cayley[group.cayley[z], group.inv(z)]  # x -> z x z^-1
    invariance_defect = float(np.abs(f.values[conj_idx] - f.values).max())
    if invariance_defect > 1e-9 * scale:
        raise TransferPreconditionError(
            f"invariance failed: f(z x z^-1) differs from f(x) by {invariance_defect:.3e}"
        )

    support = SubsetMask(group.order, np.abs(f.values) > 1e-14 * scale)
    hull = conjugate_hull(group, support, z)
    if bool(np.any(hull.members & ~omega.members)):
        raise TransferPreconditionError("condition (i) failed: conjugate hull escapes omega")
    s_set = [n for n in range(m) if abs(vec[n]) > 1e-14]
    powers = [group.identity]
    for _ in range(1, m):
        powers.append(group.mul(powers[-1], z))
    for n in s_set:
        zn = powers[n]
        translated = hull.members[group.cayley[group.inv(zn)]]  # x in z^n U* <=> z^-n x in U*
        if bool(np.any(translated & ~omega.members)):
            raise TransferPreconditionError(f"condition (ii) failed: z^{n} U* escapes omega")
    for n in range(1, m):
        if hull.members[powers[n]]:
            raise TransferPreconditionError(f"condition (iii) failed: z^{n} lies in U*")

    out = np.zeros(group.order, dtype=complex)
    for n in s_set:
        row = group.cayley[group.inv(powers[n])]  # row[x] = z^-n x
        out += vec[n] * f.values[row]
    big = GroupFunction(group.order, out)

    cert = is_posdef(group, big, tol=1e-7)
    support_ok = not bool(np.any((np.abs(out) > 1e-12 * scale) & ~omega.members))
    fe = f.values[group.identity]
    identity_defect = float(abs(big.values[group.identity] - fe))
    target_defect = float(abs(big.values[z] - vec[1 % m] * fe))
    value = float(abs(big.values[z] / big.values[group.identity]))
    report = TransferReport(
        certificate=cert,
        support_ok=support_ok,
        identity_defect=identity_defect,
        target_defect=target_defect,
        value=value,
        conditions={"i": True, "ii": True, "iii": True, "invariance_defect": invariance_defect},
    )
    return big, report
