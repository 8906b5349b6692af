"""Numerical search engines behind the "for all x" class predicates.

``family_psd_min`` decides ``P - 2*lam*Q + lam**2*R >= 0`` for all lam > 0 by
a one-parameter eigenvalue minimisation. ``sphere_min`` is an independent,
one-sided falsifier working directly on unit vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import NotHermitian, NotPSDInput
from .linalg import DEFAULT_TOL, Tolerances, hermitian_eigh, hermitian_eigenvalues, herm, operator_norm

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

GRID_POINTS = 64


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12, max_iter: int = 200):
    """Minimise a unimodal ``f`` on [a, b]; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


@dataclass(frozen=True)
class FamilyCheckResult:
    min_margin: float
    argmin_lambda: float
    bracket: tuple
    witness: np.ndarray

    def member(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.min_margin >= -tol.psd_tol


def _check_psd_input(name: str, m: np.ndarray, tol: Tolerances) -> np.ndarray:
    try:
        w = hermitian_eigenvalues(m, tol)
    except NotHermitian as exc:
        raise NotPSDInput(f"{name} is not Hermitian: {exc}") from exc
    # noise in a Gram matrix scales with its norm, so the floor does too
    floor = tol.psd_tol * max(1.0, abs(w[-1]))
    if w[0] < -floor:
        raise NotPSDInput(f"{name} is not PSD (min eigenvalue {w[0]:.3e})")
    return w


def family_bracket(Q: np.ndarray, R: np.ndarray, tol: Tolerances = DEFAULT_TOL, lam_max: float | None = None) -> tuple:
    """Search interval ``(lo, hi)`` for the auxiliary parameter lam.

    Below ``lo`` the family cannot dip under -psd_tol/2. Pointwise the
    minimising lam is ``x*Qx / x*Rx``; ``lam_max`` is a caller-supplied
    bound on that ratio. Without it, ``hi`` is where lam**2 * R dominates
    every direction R does not annihilate.
    """
    q_norm = operator_norm(Q)
    lo = 0.5 * tol.psd_tol / (1.0 + q_norm)
    if lam_max is not None:
        # large lam only amplifies roundoff in R, so stay just above the bound
        return lo, max(2.0 * lam_max, 2.0 * lo)
    r_min = float(hermitian_eigenvalues(R, tol)[0])
    hi = 2.0 * (1.0 + q_norm) / max(r_min, tol.psd_tol)
    return lo, hi


def family_psd_min(P, Q, R, tol: Tolerances = DEFAULT_TOL, lam_max: float | None = None) -> FamilyCheckResult:
    """Minimum over lam in the bracket of ``min eig(P - 2 lam Q + lam^2 R)``.

    A 64-point geometric grid brackets the dips, then golden-section in
    log(lam) refines each local minimum of the grid. Membership holds iff
    ``min_margin >= -psd_tol``. ``lam_max`` bounds ``x*Qx / x*Rx`` over x
    outside the common kernel; it keeps the search away from the noise that
    a singular R produces at large lam.
    """
    P, Q, R = (herm(np.asarray(m, dtype=np.complex128)) for m in (P, Q, R))
    for name, m in (("P", P), ("Q", Q), ("R", R)):
        _check_psd_input(name, m, tol)
    lo, hi = family_bracket(Q, R, tol, lam_max)

    def margin_at(log_lam: float) -> float:
        lam = math.exp(log_lam)
        return float(np.linalg.eigvalsh(P - 2.0 * lam * Q + lam * lam * R)[0])

    grid = np.linspace(math.log(lo), math.log(hi), GRID_POINTS)
    lams = np.exp(grid)[:, None, None]
    values = np.linalg.eigvalsh(P - 2.0 * lams * Q + lams * lams * R)[:, 0]
    best = int(np.argmin(values))
    log_star, value = grid[best], values[best]
    # every local minimum of the grid is refined: the family can have several dips
    for i in range(GRID_POINTS):
        left = values[i - 1] if i > 0 else math.inf
        right = values[i + 1] if i < GRID_POINTS - 1 else math.inf
        # exact ties (a kernel eigenvalue pinned at 0) are plateaus, not dips
        if values[i] <= left and values[i] <= right and (values[i] < left or values[i] < right):
            x, fx = golden_section(margin_at, grid[max(i - 1, 0)], grid[min(i + 1, GRID_POINTS - 1)])
            if fx < value:
                log_star, value = x, fx
    lam_star = min(max(math.exp(log_star), lo), hi)
    w, v = hermitian_eigh(P - 2.0 * lam_star * Q + lam_star**2 * R, tol)
    return FamilyCheckResult(float(w[0]), lam_star, (lo, hi), v[:, 0])


def family_pointwise(P, Q, R, bracket: tuple) -> Callable[[np.ndarray], np.ndarray]:
    """Batched objective ``x -> min_lam x*(P - 2 lam Q + lam^2 R)x`` on unit vectors.

    Minimising it over the sphere reaches the same value as
    ``family_psd_min`` (the two minimisations commute), which makes it the
    cross-check for the family engine.
    """
    lo, hi = bracket
    P, Q, R = (np.asarray(m, dtype=np.complex128) for m in (P, Q, R))

    def objective(X: np.ndarray) -> np.ndarray:
        a = np.real(np.sum(np.conj(X) * (P @ X), axis=0))
        b = np.real(np.sum(np.conj(X) * (Q @ X), axis=0))
        c = np.real(np.sum(np.conj(X) * (R @ X), axis=0))
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(c > 0, b / np.where(c > 0, c, 1.0), np.where(b > 0, hi, lo))
        lam = np.clip(lam, lo, hi)
        return a - 2.0 * lam * b + lam * lam * c

    return objective


def _normalize(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=0)
    return X / np.where(norms == 0, 1.0, norms)


def sphere_min(
    objective: Callable,
    dim: int,
    restarts: int = 8,
    seed: int = 0,
    *,
    batched: bool = True,
    max_iter: int = 400,
    h: float = 1e-6,
    polish: int = 3,
):
    """Multi-start projected gradient descent over complex unit vectors.

    ``objective`` maps a ``(dim, m)`` array of unit columns to ``m`` real
    values (or a single vector to a float when ``batched=False``).
    Gradients are central differences in the 2*dim real coordinates.
    The ``polish`` best starts are then refined with BFGS in real
    coordinates. Returns ``(best_value, best_unit_vector)``; deterministic
    for a seed.
    A negative value is a certified violation, a nonnegative one is only
    evidence.
    """
    if not batched:
        scalar = objective

        def objective(X):
            return np.array([float(scalar(X[:, j])) for j in range(X.shape[1])])

    rng = np.random.default_rng(seed)
    X = _normalize(rng.standard_normal((dim, restarts)) + 1j * rng.standard_normal((dim, restarts)))
    F = objective(X)
    eta = np.full(restarts, 0.1)
    active = np.ones(restarts, dtype=bool)
    dirs = np.concatenate([np.eye(dim), 1j * np.eye(dim)], axis=1)  # (dim, 2*dim)

    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Xa = X[:, idx]
        m = idx.size
        plus = _normalize((Xa[:, :, None] + h * dirs[:, None, :]).reshape(dim, -1))
        minus = _normalize((Xa[:, :, None] - h * dirs[:, None, :]).reshape(dim, -1))
        d = ((objective(plus) - objective(minus)) / (2.0 * h)).reshape(m, 2 * dim)
        G = (d[:, :dim] + 1j * d[:, dim:]).T  # steepest-ascent direction, (dim, m)
        gnorm2 = np.real(np.sum(np.conj(G) * G, axis=0))

        done = gnorm2 < 1e-24
        pending = ~done
        step = eta[idx].copy()
        Xnew = Xa.copy()
        Fnew = F[idx].copy()
        for _ in range(60):
            if not pending.any():
                break
            cols = np.flatnonzero(pending)
            Y = _normalize(Xa[:, cols] - step[cols] * G[:, cols])
            FY = objective(Y)
            ok = FY <= F[idx][cols] - 1e-4 * step[cols] * gnorm2[cols]
            Xnew[:, cols[ok]] = Y[:, ok]
            Fnew[cols[ok]] = FY[ok]
            pending[cols[ok]] = False
            step[cols[~ok]] *= 0.5
            tiny = step[cols] < 1e-14
            pending[cols[tiny]] = False
        improved = F[idx] - Fnew
        stalled = done | (improved <= 1e-15 * np.maximum(1.0, np.abs(F[idx])))
        X[:, idx] = Xnew
        F[idx] = Fnew
        eta[idx] = np.minimum(step * 2.0, 10.0)
        active[idx[stalled]] = False

    def real_objective(z):
        x = z[:dim] + 1j * z[dim:]
        nx = np.linalg.norm(x)
        return float(objective((x / nx)[:, None])[0]) if nx > 0 else math.inf

    eye2 = np.eye(2 * dim)

    def real_gradient(z):
        Z = np.concatenate([z[:, None] + h * eye2, z[:, None] - h * eye2], axis=1)
        vals = objective(_normalize(Z[:dim] + 1j * Z[dim:]))
        return (vals[:2 * dim] - vals[2 * dim:]) / (2.0 * h)

    for j in np.argsort(F)[:polish]:
        z0 = np.concatenate([X[:, j].real, X[:, j].imag])
        res = minimize(real_objective, z0, jac=real_gradient, method="BFGS", options={"gtol": 1e-13, "maxiter": 500})
        if np.isfinite(res.fun) and res.fun < F[j]:
            x = res.x[:dim] + 1j * res.x[dim:]
            X[:, j] = x / np.linalg.norm(x)
            F[j] = objective(X[:, j:j + 1])[0]

    best = int(np.argmin(F))
    return float(F[best]), X[:, best].copy()
