"""Group arithmetic for higher-order tangent jets of matrix Lie groups.

Two jet layouts share one container:

  kind "tangent"   order n, slots (xi_1, ..., xi_n): the n-th tangent group
                   T^nG in left trivialization, slot k the k-th fiber.
  kind "iterated"  order n, slots indexed by the nonempty subsets of
                   {1..n}: the n-fold iterated bundle T(T(...TG)).  Subset
                   A maps to list position sum(2^(i-1) for i in A) - 1, so
                   for n = 3 the slot order is 1, 2, 21, 3, 31, 32, 321
                   (labels print the subset digits in decreasing order).

All slots are Lie algebra elements (matrices); the base is a group element.
The product in both layouts is base-first:

  tangent   rho_k = zeta_k + sum over compositions (i1..il) of k of
            (-1)^(l-1) * N(i1..il) * ad_{zeta_{i_{l-1}}} ... ad_{zeta_{i_1}}
            Ad_{y^-1} xi_{i_l},
  iterated  Z_A = Y_A + sum over set partitions of A, blocks ordered by
            increasing maximum, of (-1)^(l-1) ad_{Y_{B_{l-1}}} ...
            ad_{Y_{B_1}} Ad_{y^-1} X_{B_l},

for (x, xi) * (y, zeta) resp. (x, X) * (y, Y).  N counts the set partitions
of {1..k} whose block sizes, ordered by increasing block maximum, are
exactly (i1..il); summing N over compositions of k gives the k-th Bell
number, which is how the two layouts stay consistent.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    ConfigError,
    DimensionError,
    FactorizationError,
    GroupMismatch,
    SingularMatrix,
    default_tol,
)

__all__ = [
    "GROUP_TAGS",
    "JetElement",
    "ad",
    "group_residual",
    "algebra_residual",
    "compositions",
    "partition_coefficient",
    "set_partitions",
    "subsets_by_slot",
    "subset_label",
    "unit_jet",
    "tn_multiply",
    "tn_inverse",
    "iterated_multiply",
    "iterated_inverse",
    "tn_to_iterated",
    "t3_embed",
    "g4_embed",
    "t3_factorize",
    "quad_product_parts",
    "act_and_twist",
    "random_jet",
    "jet_to_doc",
    "jet_from_doc",
    "save_jet",
    "load_jet",
]

GROUP_TAGS = ("GL", "SL", "SO")


def group_residual(group: str, g: np.ndarray) -> float:
    """How far g is from the named matrix group (0 for GL, which only needs
    invertibility -- checked separately)."""
    if group == "SO":
        d = g.shape[0]
        return max(
            float(np.max(np.abs(g.T @ g - np.eye(d)))),
            abs(float(np.linalg.det(g)) - 1.0),
        )
    if group == "SL":
        return abs(float(np.linalg.det(g)) - 1.0)
    if group == "GL":
        return 0.0
    raise ValueError(f"unknown group tag {group!r}")


def algebra_residual(group: str, x: np.ndarray) -> float:
    """How far x is from the Lie algebra of the named group."""
    if group == "SO":
        return float(np.max(np.abs(x + x.T), initial=0.0))
    if group == "SL":
        return abs(float(np.trace(x)))
    if group == "GL":
        return 0.0
    raise ValueError(f"unknown group tag {group!r}")


def ad(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix commutator."""
    return x @ y - y @ x


def _conj_by_inverse(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Ad_{y^-1} x = y^-1 x y via a linear solve."""
    try:
        return np.linalg.solve(y, x @ y)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"base matrix is not invertible: {exc}") from exc


def _inverse(g: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"base matrix is not invertible: {exc}") from exc


@dataclass(frozen=True)
class JetElement:
    """A jet of a curve in a matrix group: base point plus fiber slots.

    With no slots this is a plain group element.  The order is inferred from
    the slot count: kind "tangent" has `order` slots, kind "iterated" has
    2**order - 1.  Construction checks that the base lies in the tagged
    group and every slot in its Lie algebra, to `tol`.
    """

    group: str
    base: np.ndarray
    slots: np.ndarray = ()
    kind: str = "tangent"
    tol: float = field(default_factory=default_tol)

    def __post_init__(self) -> None:
        if self.group not in GROUP_TAGS:
            raise ValueError(f"unknown group tag {self.group!r}")
        if self.kind not in ("tangent", "iterated"):
            raise ValueError(f"unknown jet kind {self.kind!r}")
        base = np.asarray(self.base, dtype=float)
        if base.ndim != 2 or base.shape[0] != base.shape[1]:
            raise DimensionError(f"base must be a square matrix, got {base.shape}")
        d = base.shape[0]
        raw = self.slots
        if isinstance(raw, np.ndarray) and raw.ndim == 3:
            slots = np.array(raw, dtype=float)
        else:
            mats = [np.asarray(s, dtype=float) for s in raw]
            slots = np.stack(mats) if mats else np.empty((0, d, d))
        if slots.shape[1:] != (d, d):
            raise DimensionError(
                f"slots must be {d}x{d} matrices, got shape {slots.shape}"
            )
        if self.kind == "iterated":
            order = (len(slots) + 1).bit_length() - 1
            if 2**order - 1 != len(slots):
                raise DimensionError(
                    f"iterated jet needs 2^n - 1 slots, got {len(slots)}"
                )
        # validity: base in the group, slots in the algebra
        if abs(float(np.linalg.det(base))) < 1e-300:
            raise SingularMatrix("base matrix is not invertible")
        res = group_residual(self.group, base)
        if res > self.tol:
            raise ValueError(
                f"base is not in {self.group}({d}) to tol={self.tol:g} (residual {res:.3g})"
            )
        for i, s in enumerate(slots):
            res = algebra_residual(self.group, s)
            if res > self.tol:
                raise ValueError(
                    f"slot {i} is not in the Lie algebra of {self.group}({d}) "
                    f"to tol={self.tol:g} (residual {res:.3g})"
                )
        base.setflags(write=False)
        slots.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "slots", slots)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    @property
    def order(self) -> int:
        if self.kind == "tangent":
            return len(self.slots)
        return (len(self.slots) + 1).bit_length() - 1

    def replace_slots(self, slots) -> "JetElement":
        return JetElement(self.group, self.base, slots, kind=self.kind, tol=self.tol)


def _check_pair(a: JetElement, b: JetElement, kind: str, n: int) -> None:
    if a.group != b.group:
        raise GroupMismatch(f"cannot combine {a.group} with {b.group}")
    if a.dim != b.dim:
        raise DimensionError(f"matrix sizes differ: {a.dim} vs {b.dim}")
    if a.kind != kind or b.kind != kind:
        raise ValueError(f"expected two {kind!r} jets, got {a.kind!r} and {b.kind!r}")
    if a.order != n or b.order != n:
        raise DimensionError(f"expected order {n}, got {a.order} and {b.order}")


def unit_jet(group: str, dim: int, order: int, kind: str = "tangent") -> JetElement:
    n_slots = order if kind == "tangent" else 2**order - 1
    return JetElement(group, np.eye(dim), np.zeros((n_slots, dim, dim)), kind=kind)


# -- combinatorics ----------------------------------------------------------


def compositions(k: int) -> Iterator[tuple[int, ...]]:
    """All ordered tuples of positive integers summing to k."""
    if k == 0:
        yield ()
        return
    for first in range(1, k + 1):
        for rest in compositions(k - first):
            yield (first,) + rest


def partition_coefficient(i_list: Sequence[int]) -> int:
    """Number of set partitions of {1..k} whose block sizes, with blocks
    ordered by increasing maximum, are exactly (i1, ..., il).

    Equals the product over j >= 2 of C(i1 + ... + ij - 1, ij - 1): each new
    block must contain the largest element not yet placed, and its remaining
    members are free choices among the elements left over.
    """
    if not i_list:
        raise ValueError("need at least one block size")
    if any(int(i) != i or i < 1 for i in i_list):
        raise ValueError(f"block sizes must be positive integers, got {i_list!r}")
    coeff = 1
    total = i_list[0]
    for size in i_list[1:]:
        total += size
        coeff *= math.comb(total - 1, size - 1)
    return coeff


def set_partitions(items: tuple) -> Iterator[list[tuple]]:
    """Set partitions of `items`, blocks ordered by increasing maximum.

    `items` must be sorted ascending; each yielded partition is a list of
    tuples whose maxima increase along the list (so the last block contains
    max(items)).
    """
    if not items:
        yield []
        return
    head, last = items[:-1], items[-1]
    for p in set_partitions(head):
        yield p + [(last,)]
        for i in range(len(p)):
            yield [b for j, b in enumerate(p) if j != i] + [p[i] + (last,)]


# -- n-th tangent group ------------------------------------------------------


def tn_multiply(n: int, a: JetElement, b: JetElement) -> JetElement:
    """Product in T^nG, left-trivialized: (x, xi) * (y, zeta)."""
    _check_pair(a, b, "tangent", n)
    out = [np.array(z) for z in b.slots]
    for k in range(1, n + 1):
        for comp in compositions(k):
            ell = len(comp)
            acc = _conj_by_inverse(b.base, a.slots[comp[-1] - 1])
            for r in range(ell - 1):
                acc = ad(b.slots[comp[r] - 1], acc)
            out[k - 1] += (-1) ** (ell - 1) * partition_coefficient(comp) * acc
    return JetElement(a.group, a.base @ b.base, out, kind="tangent", tol=max(a.tol, b.tol))


def tn_inverse(n: int, a: JetElement) -> JetElement:
    """Inverse in T^nG.  Same composition sum as the product but with the
    ad-chain read off the element's own slots, conjugated back by the base,
    and no sign alternation."""
    if a.kind != "tangent" or a.order != n:
        raise DimensionError(f"expected a tangent jet of order {n}")
    base_inv = _inverse(a.base)
    out = []
    for k in range(1, n + 1):
        acc_k = np.zeros((a.dim, a.dim))
        for comp in compositions(k):
            ell = len(comp)
            acc = np.array(a.slots[comp[-1] - 1])
            for r in range(ell - 2, -1, -1):
                acc = ad(a.slots[comp[r] - 1], acc)
            acc_k += partition_coefficient(comp) * (a.base @ acc @ base_inv)
        out.append(-acc_k)
    return JetElement(a.group, base_inv, out, kind="tangent", tol=a.tol)


# -- iterated tangent bundle -------------------------------------------------


@lru_cache(maxsize=None)
def subsets_by_slot(n: int) -> tuple[tuple[int, ...], ...]:
    """Nonempty subsets of {1..n} in slot order (binary-counter order)."""
    return tuple(
        tuple(i for i in range(1, n + 1) if mask & (1 << (i - 1)))
        for mask in range(1, 2**n)
    )


def subset_label(subset: tuple[int, ...]) -> str:
    return "".join(str(i) for i in sorted(subset, reverse=True))


def _slot_index(subset: tuple[int, ...]) -> int:
    return sum(1 << (i - 1) for i in subset) - 1


def iterated_multiply(n: int, a: JetElement, b: JetElement) -> JetElement:
    """Product in the n-fold iterated tangent bundle of the group."""
    _check_pair(a, b, "iterated", n)
    out = [np.array(z) for z in b.slots]
    for subset in subsets_by_slot(n):
        k = _slot_index(subset)
        for blocks in set_partitions(subset):
            ell = len(blocks)
            acc = _conj_by_inverse(b.base, a.slots[_slot_index(blocks[-1])])
            for r in range(ell - 1):
                acc = ad(b.slots[_slot_index(blocks[r])], acc)
            out[k] += (-1) ** (ell - 1) * acc
    return JetElement(a.group, a.base @ b.base, out, kind="iterated", tol=max(a.tol, b.tol))


def iterated_inverse(n: int, a: JetElement) -> JetElement:
    if a.kind != "iterated" or a.order != n:
        raise DimensionError(f"expected an iterated jet of order {n}")
    base_inv = _inverse(a.base)
    out = []
    for subset in subsets_by_slot(n):
        acc_k = np.zeros((a.dim, a.dim))
        for blocks in set_partitions(subset):
            ell = len(blocks)
            acc = np.array(a.slots[_slot_index(blocks[-1])])
            for r in range(ell - 2, -1, -1):
                acc = ad(a.slots[_slot_index(blocks[r])], acc)
            acc_k += a.base @ acc @ base_inv
        out.append(-acc_k)
    return JetElement(a.group, base_inv, out, kind="iterated", tol=a.tol)


# -- embeddings and factorization --------------------------------------------


def tn_to_iterated(j: JetElement) -> JetElement:
    """Canonical embedding T^nG -> T(T(...TG)): the slot of subset A is the
    |A|-th tangent slot.  This is a group homomorphism."""
    if j.kind != "tangent":
        raise ValueError("expected a tangent jet")
    slots = [j.slots[len(subset) - 1] for subset in subsets_by_slot(j.order)]
    return JetElement(j.group, j.base, slots, kind="iterated", tol=j.tol)


def t3_embed(j: JetElement) -> JetElement:
    """Embed a third-order tangent jet into the triple iterated bundle,
    slot pattern (xi1, xi1, xi2, xi1, xi2, xi2, xi3)."""
    if j.order != 3:
        raise DimensionError(f"expected order 3, got {j.order}")
    return tn_to_iterated(j)


def g4_embed(
    x1: np.ndarray,
    x2: np.ndarray,
    x21: np.ndarray,
    x31: np.ndarray,
    group: str = "GL",
    tol: float | None = None,
) -> JetElement:
    """Embed a quadruple of algebra elements into the triple iterated bundle
    over the identity, slot pattern (X1, X2, X21, 0, X31, 0, 0)."""
    x1 = np.asarray(x1, dtype=float)
    d = x1.shape[0]
    zero = np.zeros((d, d))
    slots = (x1, x2, x21, zero, x31, zero, zero)
    kw = {} if tol is None else {"tol": tol}
    return JetElement(group, np.eye(d), slots, kind="iterated", **kw)


def t3_factorize(j: JetElement) -> tuple[np.ndarray, JetElement]:
    """Split a triple-iterated jet as (embedded quadruple) * (embedded T^3G).

    Returns (quad, t) with quad an array of the four algebra elements
    (X1, X2, X21, X31) and t a tangent jet of order 3 over the same base, so
    that iterated_multiply(3, g4_embed(*quad), t3_embed(t)) reproduces the
    input.  The round trip is verified; FactorizationError means the
    reconstruction missed, which cannot happen for a genuine triple jet.
    """
    if j.kind != "iterated" or j.order != 3:
        raise DimensionError("expected an iterated jet of order 3")
    s = j.slots  # order: 1, 2, 21, 3, 31, 32, 321
    x = j.base
    x_inv = _inverse(x)

    def push(z: np.ndarray) -> np.ndarray:  # Ad_x
        return x @ z @ x_inv

    t1 = s[3]
    t2 = s[5]
    t3 = s[6] + ad(s[3], s[4] - s[5])
    quad = np.stack(
        [
            push(s[0] - s[3]),
            push(s[1] - s[3]),
            push(s[2] - s[5] + ad(s[3], s[1] - s[3])),
            push(s[4] - s[5]),
        ]
    )
    t = JetElement(j.group, x, (t1, t2, t3), kind="tangent", tol=j.tol)
    recon = iterated_multiply(3, g4_embed(*quad, group=j.group, tol=j.tol), t3_embed(t))
    err = max(
        float(np.max(np.abs(recon.base - j.base))),
        float(np.max(np.abs(recon.slots - j.slots))),
    )
    if err > max(j.tol, 1e-10):
        raise FactorizationError(f"round-trip residual {err:.3g} exceeds tolerance")
    return quad, t


def quad_product_parts(
    quad_a: np.ndarray, quad_b: np.ndarray, group: str = "GL"
) -> tuple[np.ndarray, JetElement]:
    """Multiply two embedded quadruples and factorize the result.

    The quad part is the twisted sum of the two quadruples; the tangent part
    is the group cocycle of the decomposition (base identity, first two
    slots zero for genuine quadruples)."""
    prod = iterated_multiply(3, g4_embed(*quad_a, group=group), g4_embed(*quad_b, group=group))
    return t3_factorize(prod)


def act_and_twist(t: JetElement, quad: np.ndarray) -> tuple[np.ndarray, JetElement]:
    """Move an embedded quadruple across an embedded third-order jet:
    factorize t * quad as quad' * t'.  Returns (quad', t'), the action on
    the quadruple and the twisted jet."""
    prod = iterated_multiply(3, t3_embed(t), g4_embed(*quad, group=t.group, tol=t.tol))
    return t3_factorize(prod)


# -- sampling and serialization ----------------------------------------------


def _random_algebra(group: str, d: int, rng: np.random.Generator, scale: float) -> np.ndarray:
    a = scale * rng.standard_normal((d, d))
    if group == "SO":
        return a - a.T
    if group == "SL":
        return a - (np.trace(a) / d) * np.eye(d)
    return a


def random_jet(
    group: str,
    dim: int,
    order: int,
    kind: str = "tangent",
    rng: np.random.Generator | None = None,
    scale: float = 0.5,
) -> JetElement:
    """Random jet with base exp(random algebra element): always lands in the
    tagged group, and stays well-conditioned for moderate `scale`."""
    rng = np.random.default_rng() if rng is None else rng
    base = scipy.linalg.expm(_random_algebra(group, dim, rng, scale))
    n_slots = order if kind == "tangent" else 2**order - 1
    slots = [_random_algebra(group, dim, rng, scale) for _ in range(n_slots)]
    return JetElement(group, base, slots, kind=kind)


def jet_to_doc(j: JetElement) -> dict:
    return {
        "group": f"{j.group}{j.dim}",
        "kind": j.kind,
        "base": j.base.tolist(),
        "slots": [s.tolist() for s in j.slots],
    }


def jet_from_doc(doc: dict) -> JetElement:
    try:
        m = re.fullmatch(r"([A-Z]+)(\d+)", str(doc["group"]))
        if not m or m.group(1) not in GROUP_TAGS:
            raise ConfigError(f"bad group name {doc['group']!r}")
        base = np.asarray(doc["base"], dtype=float)
        if base.shape != (int(m.group(2)),) * 2:
            raise ConfigError(
                f"group {doc['group']} expects a {m.group(2)}x{m.group(2)} base,"
                f" got {base.shape}"
            )
        return JetElement(
            m.group(1), base, [np.asarray(s, dtype=float) for s in doc["slots"]],
            kind=doc.get("kind", "tangent"),
        )
    except KeyError as exc:
        raise ConfigError(f"jet document is missing key {exc}") from exc


def save_jet(j: JetElement, path) -> None:
    Path(path).write_text(json.dumps(jet_to_doc(j), indent=2, sort_keys=True) + "\n")


def load_jet(path) -> JetElement:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    return jet_from_doc(doc)
