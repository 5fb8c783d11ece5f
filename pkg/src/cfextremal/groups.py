"""Finite groups as Cayley tables with dense 0-based element indices."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

# Full O(n^3) associativity verification is skipped above this order and the
# table is accepted with trusted=True.
ASSOC_CHECK_LIMIT = 512


class GroupConstructionError(ValueError):
    """The descriptor or table does not define a group; names the violated axiom."""


class DegenerateSupportError(ValueError):
    """The support set excludes the identity, so f(e)=1 is unattainable."""


class FiniteGroup:
    """Immutable finite group: order, Cayley table, identity and inverse tables.

    Element i times element j is ``cayley[i, j]``.  Labels are cosmetic only;
    all arithmetic is on integer indices.
    """

    def __init__(self, cayley, labels=None, name="group", trusted=False, validate=True):
        table = np.ascontiguousarray(np.asarray(cayley, dtype=np.int64))
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise GroupConstructionError("Cayley table must be square")
        n = table.shape[0]
        if n == 0:
            raise GroupConstructionError("group must have at least one element")
        self.order = n
        self.cayley = table
        self.identity = 0
        self.name = name
        self.trusted = bool(trusted or n > ASSOC_CHECK_LIMIT)
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise GroupConstructionError("labels length does not match order")
        self.labels = [str(x) for x in labels]
        if validate:
            self._validate()
        self.inverse = self._build_inverse()
        self.cayley.flags.writeable = False
        self.inverse.flags.writeable = False

    # -- table validation ---------------------------------------------------

    def _validate(self):
        n = self.order
        t = self.cayley
        if t.min() < 0 or t.max() >= n:
            raise GroupConstructionError("table entry out of range 0..n-1")
        e = self.identity
        if not np.array_equal(t[e], np.arange(n)):
            raise GroupConstructionError("identity axiom violated: row 0 is not the identity row")
        if not np.array_equal(t[:, e], np.arange(n)):
            raise GroupConstructionError("identity axiom violated: column 0 is not the identity column")
        ordered = np.arange(n)
        for i in range(n):
            if not np.array_equal(np.sort(t[i]), ordered):
                raise GroupConstructionError(f"cancellation axiom violated: row {i} is not a permutation")
        for j in range(n):
            if not np.array_equal(np.sort(t[:, j]), ordered):
                raise GroupConstructionError(f"cancellation axiom violated: column {j} is not a permutation")
        if n <= ASSOC_CHECK_LIMIT:
            for i in range(n):
                left = t[t[i]]        # left[j, k] = (x_i x_j) x_k
                right = t[i][t]       # right[j, k] = x_i (x_j x_k)
                if not np.array_equal(left, right):
                    j, k = np.argwhere(left != right)[0]
                    raise GroupConstructionError(
                        f"associativity violated at (i,j,k)=({i},{int(j)},{int(k)})"
                    )
        else:
            self.trusted = True

    def _build_inverse(self):
        n = self.order
        inv = np.empty(n, dtype=np.int64)
        for j in range(n):
            hits = np.flatnonzero(self.cayley[j] == self.identity)
            if hits.size != 1:
                raise GroupConstructionError(f"inverse axiom violated: element {j} has {hits.size} right inverses")
            k = int(hits[0])
            if self.cayley[k, j] != self.identity:
                raise GroupConstructionError(f"inverse axiom violated: right inverse of {j} is not two-sided")
            inv[j] = k
        return inv

    # -- arithmetic -----------------------------------------------------------

    def mul(self, a, b):
        return int(self.cayley[a, b])

    def inv(self, a):
        return int(self.inverse[a])

    def power(self, z, k):
        """z**k for any integer k (negative powers via the inverse table)."""
        if k < 0:
            return self.power(self.inv(z), -k)
        acc = self.identity
        base = int(z)
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    def conjugate(self, g, x):
        """g x g^-1."""
        return self.mul(self.mul(g, x), self.inv(g))

    def elements(self):
        return range(self.order)

    @property
    def is_abelian(self):
        return bool(np.array_equal(self.cayley, self.cayley.T))

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"


@dataclass(frozen=True)
class SubsetMask:
    """Boolean membership mask over the elements of a group of given order."""

    group_order: int
    members: np.ndarray

    def __post_init__(self):
        m = np.array(self.members, dtype=bool)
        if m.shape != (self.group_order,):
            raise ValueError("mask length does not match group order")
        m.flags.writeable = False
        object.__setattr__(self, "members", m)

    @classmethod
    def from_indices(cls, group_order, indices):
        m = np.zeros(group_order, dtype=bool)
        m[list(indices)] = True
        return cls(group_order, m)

    @classmethod
    def full(cls, group_order):
        return cls(group_order, np.ones(group_order, dtype=bool))

    def indices(self):
        return [int(i) for i in np.flatnonzero(self.members)]

    def __contains__(self, idx):
        return bool(self.members[idx])

    @property
    def size(self):
        return int(self.members.sum())


@dataclass(frozen=True)
class CyclicTrace:
    """Subset of Z_m residues; the shadow of a support set along a cyclic subgroup."""

    m: int
    members: np.ndarray

    def __post_init__(self):
        v = np.array(self.members, dtype=bool)
        if v.shape != (self.m,):
            raise ValueError("trace length does not match modulus")
        v.flags.writeable = False
        object.__setattr__(self, "members", v)

    @classmethod
    def from_residues(cls, m, residues):
        v = np.zeros(m, dtype=bool)
        for r in residues:
            v[r % m] = True
        return cls(m, v)

    def residues(self):
        return [int(i) for i in np.flatnonzero(self.members)]

    def __contains__(self, k):
        return bool(self.members[k % self.m])

    @property
    def is_symmetric(self):
        idx = np.arange(self.m)
        return bool(np.array_equal(self.members, self.members[(-idx) % self.m]))


# -- constructors -------------------------------------------------------------


def cyclic_group(m):
    """Z_m with element k at index k."""
    if m < 1:
        raise GroupConstructionError("cyclic order must be >= 1")
    idx = np.arange(m)
    table = (idx[:, None] + idx[None, :]) % m
    return FiniteGroup(table, labels=[str(k) for k in range(m)], name=f"cyclic:{m}")


def dihedral_group(n):
    """Dihedral group of order 2n: rotations r^k at 0..n-1, reflections r^k*s at n..2n-1."""
    if n < 1:
        raise GroupConstructionError("dihedral parameter must be >= 1")
    size = 2 * n
    table = np.empty((size, size), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            table[a, b] = (a + b) % n                  # r^a r^b
            table[a, n + b] = n + (a + b) % n          # r^a (r^b s)
            table[n + a, b] = n + (a - b) % n          # (r^a s) r^b = r^(a-b) s
            table[n + a, n + b] = (a - b) % n          # (r^a s)(r^b s)
    labels = [f"r{k}" for k in range(n)] + [f"s{k}" for k in range(n)]
    return FiniteGroup(table, labels=labels, name=f"dihedral:{n}")


def quaternion_group():
    """Quaternion group of order 8, elements ordered (1, -1, i, -i, j, -j, k, -k)."""
    axis_mul = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (2, 0): (1, 2), (3, 0): (1, 3),
        (1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
        (1, 2): (1, 3), (2, 1): (-1, 3),
        (2, 3): (1, 1), (3, 2): (-1, 1),
        (3, 1): (1, 2), (1, 3): (-1, 2),
    }

    def encode(sign, axis):
        return 2 * axis + (0 if sign > 0 else 1)

    table = np.empty((8, 8), dtype=np.int64)
    for ia in range(8):
        for ib in range(8):
            sa, aa = (1 if ia % 2 == 0 else -1), ia // 2
            sb, ab = (1 if ib % 2 == 0 else -1), ib // 2
            sc, ac = axis_mul[(aa, ab)]
            table[ia, ib] = encode(sa * sb * sc, ac)
    labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return FiniteGroup(table, labels=labels, name="quaternion:8")


def symmetric_group(n):
    """S_n with permutations enumerated in lexicographic order; composition (p*q)(x)=p(q(x))."""
    if n < 1 or n > 6:
        raise GroupConstructionError("symmetric group supported for 1 <= n <= 6")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    table = np.empty((size, size), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(p[q[x]] for x in range(n))]
    labels = ["".join(str(x) for x in p) for p in perms]
    return FiniteGroup(table, labels=labels, name=f"symmetric:{n}")


def product_group(g1, g2):
    """Direct product; element (a, b) packs to a*|G2| + b."""
    n1, n2 = g1.order, g2.order
    a = np.arange(n1)
    b = np.arange(n2)
    # (a1,b1)*(a2,b2) componentwise, vectorized over the packed index grid
    a1 = np.repeat(a, n2)[:, None]
    b1 = np.tile(b, n1)[:, None]
    a2 = np.repeat(a, n2)[None, :]
    b2 = np.tile(b, n1)[None, :]
    table = g1.cayley[a1, a2] * n2 + g2.cayley[b1, b2]
    labels = [f"({g1.labels[i]},{g2.labels[j]})" for i in range(n1) for j in range(n2)]
    return FiniteGroup(table, labels=labels, name=f"{g1.name}x{g2.name}")


def group_from_table(table, labels=None, name="table", trusted=False):
    """Explicit Cayley table; by convention the first element is the identity."""
    return FiniteGroup(table, labels=labels, name=name, trusted=trusted)


def load_cayley_csv(path, name=None):
    """Read an n x n Cayley table of 0-based indices from a CSV file."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([int(tok) for tok in line.split(",")])
    if not rows:
        raise GroupConstructionError(f"no table rows found in {path}")
    return group_from_table(rows, name=name or f"table:{path}")


def make_group(spec):
    """Build a group from a descriptor string.

    Grammar: ``cyclic:M``, ``dihedral:N`` (order 2N), ``quaternion`` or
    ``quaternion:8``, ``symmetric:N`` (N <= 6), ``table:PATH`` (CSV), and
    ``x``-separated products such as ``cyclic:2xcyclic:3``.
    """
    if isinstance(spec, FiniteGroup):
        return spec
    text = str(spec).strip()
    parts = text.split("x")
    if len(parts) > 1:
        groups = [make_group(p) for p in parts]
        out = groups[0]
        for g in groups[1:]:
            out = product_group(out, g)
        return out
    head, _, arg = text.partition(":")
    head = head.strip().lower()
    if head == "cyclic":
        return cyclic_group(_int_arg(arg, "cyclic"))
    if head == "dihedral":
        return dihedral_group(_int_arg(arg, "dihedral"))
    if head == "quaternion":
        if arg and int(arg) != 8:
            raise GroupConstructionError("only the order-8 quaternion group is supported")
        return quaternion_group()
    if head == "symmetric":
        return symmetric_group(_int_arg(arg, "symmetric"))
    if head == "table":
        return load_cayley_csv(arg)
    raise GroupConstructionError(f"unknown group descriptor {text!r}")


def _int_arg(arg, kind):
    try:
        return int(arg)
    except (TypeError, ValueError):
        raise GroupConstructionError(f"{kind} descriptor needs an integer parameter") from None


# -- subset and trace operations ----------------------------------------------


def element_order(group, z):
    """Smallest m >= 1 with z^m = e."""
    acc = int(z)
    m = 1
    while acc != group.identity:
        acc = group.mul(acc, z)
        m += 1
        if m > group.order:
            raise GroupConstructionError("order loop exceeded group order; table is not a group")
    return m


def generated_subgroup(group, z):
    """[z^0, z^1, ..., z^(m-1)] for m the order of z."""
    out = [group.identity]
    acc = group.mul(group.identity, z)
    while acc != group.identity:
        out.append(acc)
        acc = group.mul(acc, z)
    return out


def symmetrize(group, mask):
    """Intersect a support set with its inverse set.

    Returns (symmetric mask, was_already_symmetric).  Raises
    DegenerateSupportError when the identity is missing, since then no
    candidate function can satisfy f(e)=1.
    """
    if group.identity not in mask:
        raise DegenerateSupportError("problem degenerate: f(e)=1 unattainable (identity not in support)")
    inv_members = mask.members[group.inverse]
    inter = mask.members & inv_members
    already = bool(np.array_equal(inter, mask.members))
    return SubsetMask(group.order, inter), already


def support_trace(group, omega, z):
    """Trace H = {k in Z_m : z^k in omega} for m the order of z."""
    m = element_order(group, z)
    powers = generated_subgroup(group, z)
    members = np.array([bool(omega.members[p]) for p in powers])
    return CyclicTrace(m, members)


def check_cf_condition(group, omega, z):
    """Window radius N if the trace of omega along <z> is exactly {-N..N} mod m, else None."""
    trace = support_trace(group, omega, z)
    m = trace.m
    half = m // 2
    n = 0
    while n < half and (n + 1) in trace and (-(n + 1)) in trace:
        n += 1
    window = np.zeros(m, dtype=bool)
    for k in range(-n, n + 1):
        window[k % m] = True
    if np.array_equal(window, trace.members):
        return n
    return None


def conj_invariant_core(group, umask, z):
    """Largest subset V of U with zVz^-1 = V, as the intersection of all z-conjugates of U."""
    if group.identity not in umask:
        raise DegenerateSupportError("core undefined: identity not in U")
    m = element_order(group, z)
    members = umask.members.copy()
    zj = group.identity
    for _ in range(1, m):
        zj = group.mul(zj, z)
        zj_inv = group.inv(zj)
        # x in z^j U z^-j  <=>  z^-j x z^j in U
        conj_idx = group.cayley[group.cayley[zj_inv], zj]
        members &= umask.members[conj_idx]
    return SubsetMask(group.order, members)
