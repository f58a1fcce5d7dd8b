"""Third-order reduced dynamics: T^3G collapsed onto a single Lie algebra g.

The third-order tangent algebra on g^3, with levels (eta0, eta1, eta2), has
bracket

  [(a0,a1,a2), (b0,b1,b2)] = ([a0,b0], [a0,b1]+[a1,b0],
                              [a0,b2] + 2[a1,b1] + [a2,b0]),

which is itself a cocycle double cross sum: m = tangent algebra of g
(levels 0-1), h = an abelian copy of g (level 2), trivial action, twist
psi(eta, (v0,v1)) = [eta, v0] and cocycle theta((v0,v1),(w0,w1)) = 2[v1,w1].
`third_order_product` builds exactly that structure, giving an independent
route to the same coadjoint flow that `ep3_field` writes out by hand.

The reduced equations integrate the momenta (pi0, pi1, pi2); along any
solution the combination pi0 - pi1' + pi2'' is transported by -ad*_{eta0},
which `third_order_identity_residual` checks with finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .algebra import LieAlgebra, abelian, tangent_algebra
from .dynamics import EnergySpec
from .errors import SingularFiberMap, TooFewPoints, default_tol
from .products import UnifiedProductData

__all__ = [
    "third_order_product",
    "ep3_field",
    "MatrixBasis",
    "el_t_t2g_field",
    "third_order_identity_residual",
]


def third_order_product(g: LieAlgebra) -> UnifiedProductData:
    """The third-order tangent algebra of g as a cocycle double cross sum.

    m is the tangent algebra of g (levels 0 and 1), h an abelian copy of g
    (level 2).  The action is trivial; the twist and cocycle encode how
    level 2 couples back to the lower levels.
    """
    n = g.dim
    m = tangent_algebra(g)
    h = abelian(n, labels=tuple(f"dd{l}" for l in g.labels), tol=g.tol)
    act = np.zeros((2 * n, n, 2 * n))
    theta = np.zeros((n, 2 * n, 2 * n))
    theta[:, n:, n:] = 2.0 * g.c
    psi = np.zeros((n, n, 2 * n))
    psi[:, :, :n] = g.c
    return UnifiedProductData(
        dim_m=2 * n, h=h, act=act, phi=m.c, theta=theta, psi=psi,
        m_labels=m.labels, tol=g.tol,
    )


def ep3_field(g: LieAlgebra, spec: EnergySpec, pi: np.ndarray) -> np.ndarray:
    """Third-order Euler-Poincare right-hand side on g* x g* x g*.

    With eta = I^-1 pi split into levels (eta0, eta1, eta2):

      dpi0/dt = -ad*_eta0 pi0 - ad*_eta1 pi1 - ad*_eta2 pi2
      dpi1/dt = -ad*_eta0 pi1 - 2 ad*_eta1 pi2
      dpi2/dt = -ad*_eta0 pi2

    written directly in terms of the base-algebra coadjoint; the composed
    double-cross-sum coadjoint gives the same field through an independent
    code path (see third_order_product).
    """
    if spec.kind != "quadratic":
        raise ValueError("Euler-Poincare reduction needs a quadratic energy")
    n = g.dim
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (3 * n,):
        raise ValueError(f"state must have length {3 * n}, got {pi.shape}")
    eta = spec.dual_gradient(pi)
    e0, e1, e2 = eta[:n], eta[n : 2 * n], eta[2 * n :]
    p0, p1, p2 = pi[:n], pi[n : 2 * n], pi[2 * n :]
    d0 = -(g.coad(e0, p0) + g.coad(e1, p1) + g.coad(e2, p2))
    d1 = -(g.coad(e0, p1) + 2.0 * g.coad(e1, p2))
    d2 = -g.coad(e0, p2)
    return np.concatenate([d0, d1, d2])


# -- matrix realizations ------------------------------------------------------


@dataclass(frozen=True)
class MatrixBasis:
    """A basis of a matrix Lie algebra, with coordinate maps both ways.

    Coordinates use the Frobenius pairing: coords(X) solves the Gram system
    of the basis, so coords(matrix(x)) == x exactly when the basis is
    independent.  Structure constants of the commutator come along for free.
    """

    mats: np.ndarray
    labels: tuple[str, ...] = ()
    tol: float = field(default_factory=default_tol)

    def __post_init__(self) -> None:
        mats = np.asarray(self.mats, dtype=float)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ValueError(f"expected a stack of square matrices, got {mats.shape}")
        n = mats.shape[0]
        flat = mats.reshape(n, -1)
        gram = flat @ flat.T
        # dependent basis <-> singular Gram matrix <-> fiber map not invertible
        if n > 0 and np.linalg.matrix_rank(gram) < n:
            raise SingularFiberMap("basis matrices are linearly dependent")
        proj = np.linalg.solve(gram, flat) if n else flat
        labels = tuple(self.labels) or tuple(f"E{i + 1}" for i in range(n))
        if len(labels) != n:
            raise ValueError("one label per basis matrix")
        c = np.empty((n, n, n))
        for i in range(n):
            for j in range(n):
                c[:, i, j] = proj @ (mats[i] @ mats[j] - mats[j] @ mats[i]).ravel()
        mats.setflags(write=False)
        object.__setattr__(self, "mats", mats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_proj", proj)
        object.__setattr__(self, "algebra", LieAlgebra(dim=n, c=c, labels=labels, tol=self.tol))

    @property
    def dim(self) -> int:
        return self.mats.shape[0]

    def coords(self, x: np.ndarray) -> np.ndarray:
        return self._proj @ np.asarray(x, dtype=float).ravel()

    def matrix(self, v: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(v, dtype=float), self.mats, axes=1)

    @classmethod
    def so3(cls) -> "MatrixBasis":
        mats = np.zeros((3, 3, 3))
        mats[0] = [[0, 0, 0], [0, 0, -1], [0, 1, 0]]
        mats[1] = [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]
        mats[2] = [[0, -1, 0], [1, 0, 0], [0, 0, 0]]
        return cls(mats, labels=("e1", "e2", "e3"))

    @classmethod
    def sl2(cls) -> "MatrixBasis":
        mats = np.array(
            [[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        )
        return cls(mats, labels=("H", "E", "F"))


def el_t_t2g_field(
    L: Callable[..., float],
    state: tuple,
    basis: MatrixBasis,
    fd_eps: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Euler-Lagrange right-hand sides for a Lagrangian on T(T^2 G).

    `state` is (g, xi1, xi2, eta0, eta1, eta2): a group element, two
    second-order base velocities and three fiber velocities, all matrices in
    the representation carried by `basis`.  `L` takes the six matrices and
    returns a scalar.  Returns the time derivatives of the three fiber
    momenta (delta L / delta eta0, eta1, eta2) as coordinate covectors:

      d/dt dL_eta0 = (left-trivialized dL_g) - ad*_xi1 dL_xi1 - ad*_xi2 dL_xi2
                     - ad*_eta0 dL_eta0 - ad*_eta1 dL_eta1 - ad*_eta2 dL_eta2
      d/dt dL_eta1 = dL_xi1 - ad*_xi1 dL_xi2 - ad*_eta0 dL_eta1 - 2 ad*_eta1 dL_eta2
      d/dt dL_eta2 = dL_xi2 - ad*_eta0 dL_eta2

    All derivatives of L are central finite differences along basis
    directions (the group slot moves along g exp(s E_a)), so the output
    carries O(fd_eps^2) truncation error.  When L does not depend on g, xi1,
    xi2, the equations reduce to the third-order Euler-Poincare flow.
    """
    g, xi1, xi2, eta0, eta1, eta2 = state
    alg = basis.algebra
    n = basis.dim

    def grad_slot(k: int) -> np.ndarray:
        args = [np.asarray(a, dtype=float) for a in state]
        out = np.empty(n)
        for a in range(n):
            bump = fd_eps * basis.mats[a]
            hi, lo = list(args), list(args)
            hi[k] = args[k] + bump
            lo[k] = args[k] - bump
            out[a] = (L(*hi) - L(*lo)) / (2.0 * fd_eps)
        return out

    def grad_group() -> np.ndarray:
        args = [np.asarray(a, dtype=float) for a in state]
        out = np.empty(n)
        for a in range(n):
            step = scipy.linalg.expm(fd_eps * basis.mats[a])
            hi, lo = list(args), list(args)
            hi[0] = args[0] @ step
            lo[0] = args[0] @ np.linalg.inv(step)
            out[a] = (L(*hi) - L(*lo)) / (2.0 * fd_eps)
        return out

    gg = grad_group()
    g_xi1, g_xi2 = grad_slot(1), grad_slot(2)
    g_e0, g_e1, g_e2 = grad_slot(3), grad_slot(4), grad_slot(5)
    cxi1, cxi2 = basis.coords(xi1), basis.coords(xi2)
    ce0, ce1 = basis.coords(eta0), basis.coords(eta1)
    ce2 = basis.coords(eta2)

    def astar(x: np.ndarray, mu: np.ndarray) -> np.ndarray:
        return alg.coad(x, mu)

    d0 = (
        gg
        - astar(cxi1, g_xi1)
        - astar(cxi2, g_xi2)
        - astar(ce0, g_e0)
        - astar(ce1, g_e1)
        - astar(ce2, g_e2)
    )
    d1 = g_xi1 - astar(cxi1, g_xi2) - astar(ce0, g_e1) - 2.0 * astar(ce1, g_e2)
    d2 = g_xi2 - astar(ce0, g_e2)
    return d0, d1, d2


# -- a posteriori check of the transported-momentum identity ------------------

# fourth-order central stencils; the third derivative needs i +- 3, so the
# interior of an N-point trajectory is indices 3 .. N-4.
_D1 = {2: -1.0, 1: 8.0, -1: -8.0, -2: 1.0}  # / 12h
_D2 = {2: -1.0, 1: 16.0, 0: -30.0, -1: 16.0, -2: -1.0}  # / 12h^2
_D3 = {3: -1.0, 2: 8.0, 1: -13.0, -1: 13.0, -2: -8.0, -3: 1.0}  # / 8h^3


def _stencil(series: np.ndarray, i: int, weights: dict, denom: float) -> np.ndarray:
    return sum(w * series[i + off] for off, w in weights.items()) / denom


def third_order_identity_residual(
    g: LieAlgebra, spec: EnergySpec, traj
) -> np.ndarray:
    """Residual of (d/dt + ad*_eta0)(pi0 - pi1' + pi2'') along a trajectory.

    Solutions of the third-order Euler-Poincare equations satisfy the
    identity exactly; here the time derivatives are fourth-order central
    differences, so for an RK4 trajectory with step h the residual floor is
    O(h^4) plus differencing noise.  Returns the max-abs residual at each
    interior point (indices 3 .. len-4).  Needs at least 7 points.
    """
    n = g.dim
    states = np.asarray(traj.states, dtype=float)
    times = np.asarray(traj.times, dtype=float)
    if len(states) < 7:
        raise TooFewPoints(
            f"need at least 7 trajectory points for the interior stencils, got {len(states)}"
        )
    h = float(times[1] - times[0])
    steps = np.diff(times)
    if not np.allclose(steps, h, rtol=1e-9, atol=1e-12):
        raise ValueError("identity check expects a uniform time grid")
    p0, p1, p2 = states[:, :n], states[:, n : 2 * n], states[:, 2 * n :]
    out = np.empty(len(states) - 6)
    for idx, i in enumerate(range(3, len(states) - 3)):
        eta0 = spec.dual_gradient(states[i])[:n]
        inner = (
            p0[i]
            - _stencil(p1, i, _D1, 12.0 * h)
            + _stencil(p2, i, _D2, 12.0 * h * h)
        )
        d_inner = (
            _stencil(p0, i, _D1, 12.0 * h)
            - _stencil(p1, i, _D2, 12.0 * h * h)
            + _stencil(p2, i, _D3, 8.0 * h**3)
        )
        r = d_inner + g.coad(eta0, inner)
        out[idx] = np.max(np.abs(r), initial=0.0)
    return out
