"""Finite-dimensional Lie algebras over R, given by structure constants.

Conventions used throughout the package:

  * A Lie algebra of dimension n is stored as a dense tensor c with
    c[k, i, j] = coefficient of e_k in [e_i, e_j].
  * ad_matrix(x)[k, j] = sum_i c[k, i, j] x_i, so bracket(x, y) = ad_matrix(x) @ y.
  * The coadjoint uses the duality pairing <mu, y> = sum_k mu_k y_k and is fixed
    by <coad(x) mu, y> = -<mu, [x, y]>, i.e. coad_matrix(x) = -ad_matrix(x).T.

Antisymmetry of c in its last two indices is enforced at construction (pass
strict=False to build a deliberately broken tensor for diagnostics; validate()
will report the violation).  The Jacobi identity is never enforced at
construction -- validate() reports its residual so that near-miss tensors can
be examined rather than rejected.
"""

from __future__ import annotations

import json
from dataclasses import InitVar, dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ConfigError, DimensionError, UnknownPreset, default_tol


def _default_labels(dim: int) -> tuple[str, ...]:
    return tuple(f"e{i + 1}" for i in range(dim))


@dataclass(frozen=True)
class LieAlgebra:
    """Structure-constant presentation of a real Lie algebra."""

    dim: int
    c: np.ndarray
    labels: tuple[str, ...] = ()
    tol: float = field(default_factory=default_tol)
    strict: InitVar[bool] = True

    def __post_init__(self, strict: bool) -> None:
        c = np.array(self.c, dtype=float, copy=True)
        if c.shape != (self.dim, self.dim, self.dim):
            raise DimensionError(
                f"structure tensor has shape {c.shape}, expected {(self.dim,) * 3}"
            )
        labels = tuple(self.labels) if self.labels else _default_labels(self.dim)
        if len(labels) != self.dim:
            raise DimensionError(
                f"{len(labels)} labels for a dimension-{self.dim} algebra"
            )
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "labels", labels)
        if strict:
            res = self.antisymmetry_residual()
            if res > self.tol:
                raise ValueError(
                    f"structure tensor is not antisymmetric (residual {res:.3e}); "
                    "pass strict=False to construct anyway"
                )

    # -- basic operations ---------------------------------------------------

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = self._coerce(x)
        y = self._coerce(y)
        return np.einsum("kij,i,j->k", self.c, x, y)

    def ad_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ad_x = [x, .] acting on coordinate vectors."""
        return np.einsum("kij,i->kj", self.c, self._coerce(x))

    def coad_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of the coadjoint action, <coad(x) mu, y> = -<mu, [x, y]>."""
        return -self.ad_matrix(x).T

    def coad(self, x: np.ndarray, mu: np.ndarray) -> np.ndarray:
        x = self._coerce(x)
        mu = self._coerce(mu)
        return -np.einsum("kij,i,k->j", self.c, x, mu)

    def _coerce(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionError(f"vector has shape {v.shape}, expected ({self.dim},)")
        return v

    # -- diagnostics --------------------------------------------------------

    def antisymmetry_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.c + self.c.swapaxes(1, 2))))

    def jacobi_residual(self) -> float:
        """Max over basis triples of |[[e_i,e_j],e_l] + cyclic|."""
        if self.dim == 0:
            return 0.0
        t = np.einsum("kml,mij->kijl", self.c, self.c)
        cyc = t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)
        return float(np.max(np.abs(cyc)))

    def validate(self) -> "AlgebraReport":
        anti = self.antisymmetry_residual()
        jac = self.jacobi_residual()
        return AlgebraReport(
            antisymmetry=anti,
            jacobi=jac,
            tol=self.tol,
            ok=(anti <= self.tol and jac <= self.tol),
        )


@dataclass(frozen=True)
class AlgebraReport:
    antisymmetry: float
    jacobi: float
    tol: float
    ok: bool


# -- constructions ------------------------------------------------------------


def from_sparse_entries(
    dim: int,
    entries: Iterable[tuple[int, int, int, float]],
    labels: tuple[str, ...] = (),
    tol: float | None = None,
) -> LieAlgebra:
    """Build an algebra from sparse entries [k, i, j, value] with i < j.

    Each entry contributes value to c[k, i, j] and -value to c[k, j, i], so the
    result is antisymmetric by construction.
    """
    c = np.zeros((dim, dim, dim))
    for entry in entries:
        if len(entry) != 4:
            raise ConfigError(f"structure entry {entry!r} is not [k, i, j, value]")
        k, i, j, value = entry
        k, i, j = int(k), int(i), int(j)
        for idx in (k, i, j):
            if not 0 <= idx < dim:
                raise ConfigError(f"index {idx} out of range for dimension {dim}")
        if not i < j:
            raise ConfigError(
                f"sparse entries must have i < j (got i={i}, j={j}); "
                "the loader antisymmetrizes"
            )
        c[k, i, j] += float(value)
        c[k, j, i] -= float(value)
    kwargs = {} if tol is None else {"tol": tol}
    return LieAlgebra(dim=dim, c=c, labels=labels, **kwargs)


def abelian(dim: int, labels: tuple[str, ...] = (), tol: float | None = None) -> LieAlgebra:
    """The abelian algebra of the given dimension (all brackets zero)."""
    if dim < 0:
        raise ConfigError(f"abelian dimension must be >= 0, got {dim}")
    kwargs = {} if tol is None else {"tol": tol}
    return LieAlgebra(dim=dim, c=np.zeros((dim, dim, dim)), labels=labels, **kwargs)


def tangent_algebra(g: LieAlgebra) -> LieAlgebra:
    """The tangent-bundle algebra g |x g with
    [(x1, x2), (y1, y2)] = ([x1, y1], [x1, y2] + [x2, y1])."""
    n = g.dim
    c = np.zeros((2 * n, 2 * n, 2 * n))
    c[:n, :n, :n] = g.c
    c[n:, :n, n:] = g.c
    c[n:, n:, :n] = g.c
    labels = g.labels + tuple(f"d{lbl}" for lbl in g.labels)
    return LieAlgebra(dim=2 * n, c=c, labels=labels, tol=g.tol)


def _so3() -> LieAlgebra:
    c = np.zeros((3, 3, 3))
    for k in range(3):
        for i in range(3):
            for j in range(3):
                c[k, i, j] = _levi_civita(k, i, j)
    return LieAlgebra(dim=3, c=c, labels=("e1", "e2", "e3"))


def _levi_civita(a: int, b: int, c: int) -> float:
    if (a, b, c) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        return 1.0
    if (a, b, c) in ((0, 2, 1), (2, 1, 0), (1, 0, 2)):
        return -1.0
    return 0.0


def _sl2() -> LieAlgebra:
    # Basis (H, E, F): [H, E] = 2E, [H, F] = -2F, [E, F] = H.
    return from_sparse_entries(
        3,
        [(1, 0, 1, 2.0), (2, 0, 2, -2.0), (0, 1, 2, 1.0)],
        labels=("H", "E", "F"),
    )


def _heisenberg() -> LieAlgebra:
    # [q, p] = z, z central.
    return from_sparse_entries(3, [(2, 0, 1, 1.0)], labels=("q", "p", "z"))


def preset(name: str, **params) -> LieAlgebra:
    """Named algebra presets: abelian (needs dim), so3, sl2, heisenberg,
    tangent (needs base: name or LieAlgebra)."""
    if name == "abelian":
        if "dim" not in params:
            raise ConfigError("abelian preset needs a dim parameter")
        dim = int(params.pop("dim"))
        _reject_extra(name, params)
        return abelian(dim)
    if name == "so3":
        _reject_extra(name, params)
        return _so3()
    if name == "sl2":
        _reject_extra(name, params)
        return _sl2()
    if name == "heisenberg":
        _reject_extra(name, params)
        return _heisenberg()
    if name == "tangent":
        if "base" not in params:
            raise ConfigError("tangent preset needs a base parameter")
        base = params.pop("base")
        _reject_extra(name, params)
        if isinstance(base, str):
            base = preset(base)
        if not isinstance(base, LieAlgebra):
            raise ConfigError("tangent base must be a preset name or a LieAlgebra")
        return tangent_algebra(base)
    raise UnknownPreset(f"unknown algebra preset {name!r}")


def _reject_extra(name: str, params: dict) -> None:
    if params:
        raise ConfigError(f"unexpected parameters for preset {name!r}: {sorted(params)}")


# -- JSON serialization --------------------------------------------------------
#
# Document format:
#   {"dim": n, "labels": [...], "c": [[k, i, j, value], ...]}
# with one entry per independent (i < j) nonzero structure constant.


def algebra_to_doc(alg: LieAlgebra) -> dict:
    entries = []
    for k in range(alg.dim):
        for i in range(alg.dim):
            for j in range(i + 1, alg.dim):
                if alg.c[k, i, j] != 0.0:
                    entries.append([k, i, j, float(alg.c[k, i, j])])
    return {"dim": alg.dim, "labels": list(alg.labels), "c": entries}


def algebra_from_doc(doc: dict) -> LieAlgebra:
    if not isinstance(doc, dict):
        raise ConfigError(f"algebra document must be an object, got {type(doc).__name__}")
    if "dim" not in doc:
        raise ConfigError("algebra document is missing 'dim'")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 0:
        raise ConfigError(f"'dim' must be a non-negative integer, got {dim!r}")
    labels = tuple(doc.get("labels", ()))
    if labels and len(labels) != dim:
        raise ConfigError(f"{len(labels)} labels for dimension {dim}")
    entries = doc.get("c", [])
    if not isinstance(entries, list):
        raise ConfigError("'c' must be a list of [k, i, j, value] entries")
    return from_sparse_entries(dim, entries, labels=labels)


def save_algebra(alg: LieAlgebra, path: str | Path) -> None:
    Path(path).write_text(json.dumps(algebra_to_doc(alg), indent=2) + "\n")


def load_algebra(path: str | Path) -> LieAlgebra:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"failed to parse {path}: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc
    return algebra_from_doc(doc)
