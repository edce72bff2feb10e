"""Graph penalty operators and penalized fitting of knot values.

The generalized lasso problems here use the objective

    1/2 * ||y - Z beta||^2 + lambda * ||D beta||_1

which is the scaling under which the dual path satisfies beta = y - D^T u with
||u||_inf <= lambda. Generalized ridge solves (Z^T Z + lambda D^T D) beta = Z^T y.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import linalg

from .errors import ConvergenceError, ShapeError
from .models import GraphOperators, Skeleton

PINV_RTOL = 1e-10


def least_squares_fit(Z: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimum-norm least squares solution of Z beta = y."""
    Z = np.asarray(Z, dtype=float)
    beta, _, rank, _ = linalg.lstsq(Z, np.asarray(y, dtype=float), lapack_driver="gelsd")
    if rank < Z.shape[1]:
        logging.debug(f"Design has rank {rank} < {Z.shape[1]}; using the minimum-norm solution")
    return beta


def graph_operators(skeleton: Skeleton, q: int) -> GraphOperators:
    if q < 0:
        raise ValueError(f"trend order must be nonnegative, got {q}")
    k = skeleton.k
    m = len(skeleton.edges)
    B = np.zeros((k, m))
    B_oriented = np.zeros((k, m))
    adjacency = np.zeros((k, k))
    for column, edge in enumerate(skeleton.edges):
        B[edge.i, column] = B[edge.j, column] = 1.0
        low, high = min(edge.i, edge.j), max(edge.i, edge.j)
        B_oriented[low, column] = 1.0
        B_oriented[high, column] = -1.0
        adjacency[edge.i, edge.j] = adjacency[edge.j, edge.i] = 1.0
    L = np.diag(adjacency.sum(axis=1)) - adjacency

    if q % 2 == 1:
        delta = np.linalg.matrix_power(L, (q + 1) // 2)
    else:
        delta = B_oriented.T @ np.linalg.matrix_power(L, q // 2)
    return GraphOperators(B=B, B_oriented=B_oriented, L=L, order=q, delta=delta)


def gen_ridge_fit(Z: np.ndarray, y: np.ndarray, delta: np.ndarray, lam: float) -> np.ndarray:
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if lam == 0:
        return least_squares_fit(Z, y)
    Z = np.asarray(Z, dtype=float)
    system = Z.T @ Z + lam * (delta.T @ delta)
    beta, _, rank, _ = linalg.lstsq(system, Z.T @ np.asarray(y, dtype=float), lapack_driver="gelsd")
    if rank < system.shape[0]:
        logging.warning(
            f"Generalized ridge system has rank {rank} < {system.shape[0]}; using the minimum-norm solution"
        )
    return beta


@dataclass
class LassoPath:
    """Knots of the generalized lasso solution path, lambdas strictly decreasing to 0."""

    lambdas: np.ndarray
    u: List[np.ndarray] = field(default_factory=list)
    beta: List[np.ndarray] = field(default_factory=list)

    def beta_at(self, lam: float) -> np.ndarray:
        """Primal solution at any lambda; it is linear in lambda between path knots."""
        return self._interpolate(self.beta, lam)

    def u_at(self, lam: float) -> np.ndarray:
        """Dual solution at any lambda below the first knot."""
        return self._interpolate(self.u, lam)

    def _interpolate(self, values: List[np.ndarray], lam: float) -> np.ndarray:
        lambdas = self.lambdas
        if lam >= lambdas[0]:
            return values[0].copy()
        if lam <= 0:
            return values[-1].copy()
        upper = int(np.searchsorted(-lambdas, -lam, side="right")) - 1
        lower = upper + 1
        hi, lo = lambdas[upper], lambdas[lower]
        weight = (lam - lo) / (hi - lo)
        return weight * values[upper] + (1.0 - weight) * values[lower]


def _pinv(matrix: np.ndarray) -> np.ndarray:
    if matrix.size == 0:
        return matrix.T.copy()
    return linalg.pinv(matrix, atol=0.0, rtol=PINV_RTOL)


def gen_lasso_dual_path(
    y: np.ndarray, D: np.ndarray, max_steps: Optional[int] = None, eps: float = 1e-10
) -> LassoPath:
    """Full solution path of the signal-form generalized lasso by the dual boundary-set homotopy."""
    y = np.asarray(y, dtype=float)
    D = np.asarray(D, dtype=float)
    if y.ndim != 1 or D.ndim != 2 or D.shape[1] != y.shape[0]:
        raise ShapeError(f"D must be m x {y.shape[0]}, got shape {D.shape}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(D))):
        raise ShapeError("y and D must be finite")
    m = D.shape[0]
    if max_steps is None:
        max_steps = 50 * max(m, 1) + 50

    boundary: List[int] = []
    signs: List[float] = []
    lam = np.inf
    # the coordinate that moved last and, if it left the boundary, the sign it left with
    last_moved, left_sign = -1, 0.0
    lambdas: List[float] = []
    duals: List[np.ndarray] = []
    primals: List[np.ndarray] = []

    floor = 0.0
    # c and d below these levels are rounding residue of an exactly fused coordinate
    d_scale = max(1.0, float(np.abs(D).sum(axis=1).max(initial=0.0)))
    c_zero = eps * d_scale * max(1.0, float(np.abs(y).max(initial=0.0)))
    d_zero = eps * d_scale * d_scale

    for step in range(max_steps):
        interior = [i for i in range(m) if i not in boundary]
        D_int = D[interior]
        D_bnd = D[boundary]
        s = np.array(signs)
        pinv_t = _pinv(D_int.T)
        a = pinv_t @ y
        boundary_term = D_bnd.T @ s if boundary else np.zeros_like(y)
        b = pinv_t @ boundary_term

        # hitting times: a_i - lam * b_i reaches +lam or -lam
        hit, hit_index, hit_sign = 0.0, -1, 0.0
        for row, coord in enumerate(interior):
            for sign in (1.0, -1.0):
                if coord == last_moved and sign == left_sign:
                    continue
                denominator = b[row] + sign
                if denominator == 0:
                    continue
                time = a[row] / denominator
                if 0 < time <= lam * (1 + eps) and time > hit:
                    hit, hit_index, hit_sign = min(time, lam), coord, sign

        # leaving times of boundary coordinates
        leave, leave_index = 0.0, -1
        if boundary:
            residual_y = y - D_int.T @ a
            residual_s = boundary_term - D_int.T @ b
            c = s * (D_bnd @ residual_y)
            d = s * (D_bnd @ residual_s)
            for row, coord in enumerate(boundary):
                if coord == last_moved or not (c[row] < -c_zero and d[row] < -d_zero):
                    continue
                time = c[row] / d[row]
                if time <= lam * (1 + eps) and time > leave:
                    leave, leave_index = min(time, lam), coord

        next_lam = max(hit, leave)
        if next_lam <= floor:
            break

        u = np.zeros(m)
        u[interior] = a - next_lam * b
        if boundary:
            u[boundary] = next_lam * s
        beta = y - D.T @ u
        if lambdas and next_lam >= lambdas[-1] * (1 - eps):
            # simultaneous events share one path knot
            duals[-1], primals[-1] = u, beta
        else:
            lambdas.append(next_lam)
            if len(lambdas) == 1:
                # events this close to zero are rounding noise on the final segment
                floor = eps * next_lam
            duals.append(u)
            primals.append(beta)

        if hit >= leave:
            boundary.append(hit_index)
            signs.append(hit_sign)
            last_moved, left_sign = hit_index, 0.0
            logging.debug(f"Path step {step}: coordinate {hit_index} hits at lambda={next_lam:.6g}")
        else:
            position = boundary.index(leave_index)
            del boundary[position]
            left_sign = signs.pop(position)
            last_moved = leave_index
            logging.debug(f"Path step {step}: coordinate {leave_index} leaves at lambda={next_lam:.6g}")
        lam = next_lam
    else:
        raise ConvergenceError(
            f"dual path did not reach lambda=0 within {max_steps} steps", gap=float(lam), iterations=max_steps
        )

    lambdas.append(0.0)
    duals.append(np.zeros(m))
    primals.append(y.copy())
    excess = max((float(np.abs(u).max(initial=0.0)) - level for level, u in zip(lambdas, duals)), default=0.0)
    if excess > 1e-6 * max(1.0, lambdas[0]):
        logging.warning(f"Dual path leaves the box |u| <= lambda by {excess:.3g}")
    return LassoPath(lambdas=np.array(lambdas), u=duals, beta=primals)


def lasso_objective(Z: np.ndarray, y: np.ndarray, D: np.ndarray, lam: float, beta: np.ndarray) -> float:
    residual = y - Z @ beta
    return 0.5 * float(residual @ residual) + lam * float(np.abs(D @ beta).sum())


def _soft_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def gen_lasso_fixed_lambda(
    Z: np.ndarray,
    y: np.ndarray,
    D: np.ndarray,
    lam: float,
    tol: float = 1e-8,
    max_iter: int = 200000,
    rho: Optional[float] = None,
) -> np.ndarray:
    """Regression-form generalized lasso at one lambda, solved by ADMM from a zero start."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    D = np.asarray(D, dtype=float)
    if lam == 0:
        return least_squares_fit(Z, y)

    m, k = D.shape
    gram = Z.T @ Z
    if rho is None:
        # balance the data and penalty curvature
        rho = max(float(np.trace(gram)) / max(float(np.sum(D * D)), 1e-12), 1e-8)
    solve = _pinv(gram + rho * (D.T @ D))
    zty = Z.T @ y
    beta = np.zeros(k)
    w = np.zeros(m)
    u = np.zeros(m)
    objective = lasso_objective(Z, y, D, lam, beta)
    primal = dual = np.inf
    for iteration in range(1, max_iter + 1):
        beta = solve @ (zty + rho * (D.T @ (w - u)))
        d_beta = D @ beta
        w_prev = w
        w = _soft_threshold(d_beta + u, lam / rho)
        u = u + d_beta - w

        primal = float(np.linalg.norm(d_beta - w))
        dual = rho * float(np.linalg.norm(D.T @ (w - w_prev)))
        new_objective = lasso_objective(Z, y, D, lam, beta)
        scale = max(1.0, abs(new_objective))
        settled = abs(objective - new_objective) <= tol * scale
        objective = new_objective
        primal_scale = max(1.0, float(np.linalg.norm(d_beta)), float(np.linalg.norm(w)))
        dual_scale = max(1.0, rho * float(np.linalg.norm(D.T @ u)))
        if settled and primal <= tol * primal_scale and dual <= tol * dual_scale:
            logging.debug(f"ADMM converged after {iteration} iterations")
            return beta
    raise ConvergenceError(
        f"generalized lasso did not converge within {max_iter} iterations",
        gap=max(primal, dual),
        iterations=max_iter,
    )
