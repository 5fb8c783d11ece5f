"""Positive definiteness on finite groups and the constructions that preserve it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup, GroupConstructionError
from .linalg import eigh

DEFAULT_PD_TOL = 1e-9


@dataclass(frozen=True)
class GroupFunction:
    """Complex-valued function on a finite group, stored as a value per element index."""

    group_order: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (self.group_order,):
            raise ValueError("values length does not match group order")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def at_identity(self):
        return complex(self.values[0])

    def to_json(self):
        return {
            "group_order": self.group_order,
            "values": [[float(z.real), float(z.imag)] for z in self.values],
        }

    @classmethod
    def from_json(cls, obj):
        vals = np.array([complex(re, im) for re, im in obj["values"]])
        return cls(int(obj["group_order"]), vals)


@dataclass(frozen=True)
class PDCertificate:
    """Eigenvalue evidence that a candidate function is (or is not) positive definite.

    ``verdict`` is "pd" for a strictly interior minimum eigenvalue, "borderline"
    when the minimum eigenvalue vanishes within tolerance (rank-deficient, as
    extremal witnesses are), and "not_pd" otherwise.  Both "pd" and
    "borderline" certify positive semidefiniteness within the tolerance.
    """

    min_eigenvalue: float
    hermitian_residual: float
    verdict: str
    tolerance: float

    @property
    def accepted(self):
        return self.verdict != "not_pd"

    def to_json(self):
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "hermitian_residual": self.hermitian_residual,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
        }


class NotPositiveDefiniteError(ValueError):
    """Raised when an operation requires a pd input; carries the failing certificate."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


def delta_identity(group):
    v = np.zeros(group.order, dtype=complex)
    v[group.identity] = 1.0
    return GroupFunction(group.order, v)


def constant_one(group):
    return GroupFunction(group.order, np.ones(group.order, dtype=complex))


def group_matrix(group, f):
    """The |G| x |G| matrix M[x, y] = f(x y^-1)."""
    if f.group_order != group.order:
        raise ValueError("function length does not match group order")
    idx = group.cayley[:, group.inverse]  # idx[x, y] = x * y^-1
    return f.values[idx]


def is_posdef(group, f, tol=DEFAULT_PD_TOL):
    """Certificate from the spectrum of the full group matrix.

    On a finite group the single matrix over all elements dominates every
    finite sub-selection (each is a principal submatrix), so this decides
    positive definiteness outright.  Tolerance is relative to max(1, |f(e)|).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    mat = group_matrix(group, f)
    residual = float(np.abs(mat - mat.conj().T).max())
    scale = max(1.0, abs(f.values[group.identity]))
    tol_eff = tol * scale
    if residual > tol_eff:
        return PDCertificate(float("nan"), residual, "not_pd", tol_eff)
    evals, _ = eigh(0.5 * (mat + mat.conj().T))
    lam_min = float(evals[0])
    if lam_min < -tol_eff:
        verdict = "not_pd"
    elif lam_min < tol_eff:
        verdict = "borderline"
    else:
        verdict = "pd"
    return PDCertificate(lam_min, residual, verdict, tol_eff)


def reversed_function(group, f):
    """f~(x) = conj(f(x^-1)); fixed point of pd functions."""
    return GroupFunction(group.order, np.conj(f.values[group.inverse]))


def convolution(group, f, g):
    """(f * g)(x) = sum_y f(y) g(y^-1 x) with counting measure."""
    if f.group_order != group.order or g.group_order != group.order:
        raise ValueError("function length does not match group order")
    shifted = g.values[group.cayley[group.inverse, :]]  # shifted[y, x] = g(y^-1 x)
    return GroupFunction(group.order, f.values @ shifted)


def conv_square(group, g):
    """g * g~, always positive definite; value at e is sum |g|^2."""
    return convolution(group, g, reversed_function(group, g))


def schur_product(f, g):
    """Pointwise product; pd inputs give a pd output (Schur product theorem)."""
    if f.group_order != g.group_order:
        raise ValueError("mismatched group orders")
    return GroupFunction(f.group_order, f.values * g.values)


def conic_combination(alpha, f, beta, g):
    """alpha*f + beta*g for positive weights."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("conic combination requires strictly positive weights")
    if f.group_order != g.group_order:
        raise ValueError("mismatched group orders")
    return GroupFunction(f.group_order, alpha * f.values + beta * g.values)


def subgroup_structure(group, elements):
    """Re-index a subgroup given by element indices into its own FiniteGroup.

    The identity is placed first; raises if the set is not closed under the
    group operation and inverses.
    """
    elems = [int(x) for x in elements]
    if len(set(elems)) != len(elems) or not elems:
        raise ValueError("not a subgroup: empty or repeated elements")
    if group.identity not in elems:
        raise ValueError("not a subgroup: identity missing")
    ordered = [group.identity] + [x for x in elems if x != group.identity]
    pos = {x: i for i, x in enumerate(ordered)}
    k = len(ordered)
    table = np.empty((k, k), dtype=np.int64)
    for i, a in enumerate(ordered):
        if group.inv(a) not in pos:
            raise ValueError(f"not a subgroup: inverse of element {a} missing")
        for j, b in enumerate(ordered):
            prod = group.mul(a, b)
            if prod not in pos:
                raise ValueError(f"not a subgroup: product {a}*{b} escapes the set")
            table[i, j] = pos[prod]
    labels = [group.labels[x] for x in ordered]
    sub = FiniteGroup(table, labels=labels, name=f"{group.name}|sub{k}")
    return sub, ordered


def restrict_to_subgroup(group, f, elements):
    """Restriction of f to a subgroup, on the subgroup's own Cayley structure."""
    sub, ordered = subgroup_structure(group, elements)
    vals = f.values[np.array(ordered)]
    return sub, GroupFunction(sub.order, vals)


def trivial_extension(group, elements, h, tol=DEFAULT_PD_TOL):
    """Extend a pd function on a subgroup by zero to the whole group.

    The extension of a pd function is pd; a non-pd input is rejected with its
    certificate attached.
    """
    sub, ordered = subgroup_structure(group, elements)
    if h.group_order != sub.order:
        raise ValueError("function length does not match subgroup order")
    cert = is_posdef(sub, h, tol=tol)
    if not cert.accepted:
        raise NotPositiveDefiniteError("subgroup function is not positive definite", cert)
    vals = np.zeros(group.order, dtype=complex)
    for i, x in enumerate(ordered):
        vals[x] = h.values[i]
    return GroupFunction(group.order, vals)


def derived_function(group, f, y_elements, coefficients):
    """F(x) = sum_{j,k} conj(a_j) a_k f(y_j^-1 x y_k); pd for pd f."""
    ys = [int(v) for v in y_elements]
    a = np.asarray(coefficients, dtype=complex)
    if len(ys) != a.shape[0] or len(ys) == 0:
        raise ValueError("element and coefficient lists must have equal positive length")
    out = np.zeros(group.order, dtype=complex)
    for j, yj in enumerate(ys):
        left = group.cayley[group.inv(yj)]  # left[x] = y_j^-1 x
        for k, yk in enumerate(ys):
            idx = group.cayley[left, yk]    # idx[x] = y_j^-1 x y_k
            out += np.conj(a[j]) * a[k] * f.values[idx]
    return GroupFunction(group.order, out)
