"""Dense complex matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every routine
here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NotHermitian, NotPositiveDefinite, NotPSD


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every predicate and verifier.

    eq_tol
        relative tolerance for matrix-identity residuals.
    psd_tol
        absolute eigenvalue floor for PSD verdicts.
    spec_tol
        convergence tolerance of the spectral-radius iteration.
    margin_gate
        multiplier separating numerical noise from genuine failures.
    """

    eq_tol: float = 1e-10
    psd_tol: float = 1e-9
    spec_tol: float = 1e-8
    margin_gate: float = 10.0

    def __post_init__(self):
        for name in ("eq_tol", "psd_tol", "spec_tol", "margin_gate"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.margin_gate < 1:
            raise ValueError("margin_gate must be >= 1")

    def as_dict(self) -> dict:
        return {
            "eq_tol": self.eq_tol,
            "psd_tol": self.psd_tol,
            "spec_tol": self.spec_tol,
            "margin_gate": self.margin_gate,
        }


DEFAULT_TOL = Tolerances()


def as_matrix(m) -> np.ndarray:
    """Validate and convert ``m`` to a square, finite complex128 array."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def herm(m: np.ndarray) -> np.ndarray:
    """Exactly Hermitian part ``(m + m*) / 2``."""
    return 0.5 * (m + adjoint(m))


def gram(m: np.ndarray) -> np.ndarray:
    """``m* m`` made exactly Hermitian."""
    return herm(adjoint(m) @ m)


def cogram(m: np.ndarray) -> np.ndarray:
    """``m m*`` made exactly Hermitian."""
    return herm(m @ adjoint(m))


def fro(m) -> float:
    return float(np.linalg.norm(m))


def rel(num: float, den: float) -> float:
    """``num / den`` with the convention 0/0 = 0."""
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def hermitian_residual(h: np.ndarray) -> float:
    return rel(fro(h - adjoint(h)), fro(h))


def _check_hermitian(h: np.ndarray, tol: Tolerances) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    res = hermitian_residual(h)
    if res > tol.eq_tol:
        raise NotHermitian(res)
    return herm(h)


def jacobi_eigh(h: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Each rotation first removes the phase of the pivot ``h[p, q]`` and then
    applies a real plane rotation. Returns ascending eigenvalues and the
    matching unitary eigenvector matrix.
    """
    a = herm(np.array(h, dtype=np.complex128))
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = fro(a)
    if scale == 0.0 or n == 1:
        w = np.real(np.diag(a)).copy()
        order = np.argsort(w, kind="stable")
        return w[order], v[:, order]
    for _ in range(max_sweeps):
        if fro(a - np.diag(np.diag(a))) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = a[p, q]
                mag = abs(z)
                if mag <= tol * scale * 1e-3:
                    a[p, q] = a[q, p] = 0.0
                    continue
                phase = z / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = adjoint(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigh(h: np.ndarray, tol: Tolerances = DEFAULT_TOL, method: str = "lapack"):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    h = _check_hermitian(h, tol)
    if method == "lapack":
        w, v = np.linalg.eigh(h)
        return w, v
    if method == "jacobi":
        return jacobi_eigh(h)
    raise ValueError(f"unknown eigen method {method!r}")


def hermitian_eigenvalues(h: np.ndarray, tol: Tolerances = DEFAULT_TOL, method: str = "lapack") -> np.ndarray:
    h = _check_hermitian(h, tol)
    if method == "lapack":
        return np.linalg.eigvalsh(h)
    return hermitian_eigh(h, tol, method)[0]


def psd_margin(h: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> float:
    """Minimum eigenvalue; the caller declares PSD iff it is >= -psd_tol."""
    return float(hermitian_eigenvalues(h, tol)[0])


def min_eigpair(h: np.ndarray, tol: Tolerances = DEFAULT_TOL):
    w, v = hermitian_eigh(h, tol)
    return float(w[0]), v[:, 0]


def singular_values(m: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(m, dtype=np.complex128), compute_uv=False)


def operator_norm(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=np.complex128)
    if m.size == 0:
        return 0.0
    return float(singular_values(m)[0])


def sigma_min(m: np.ndarray) -> float:
    return float(singular_values(m)[-1])


NILPOTENT_EPS_FACTOR = 16.0


def spectral_radius(m: np.ndarray, tol: Tolerances = DEFAULT_TOL, max_squarings: int = 60) -> float:
    """Gelfand limit ``lim ||m^n||^(1/n)`` along n = 2^k.

    The iterate is renormalised after every squaring; the logarithm of the
    norm is carried separately so nothing overflows or underflows. At the
    first power past the dimension, a relative norm at roundoff level
    (``16 * dim * power * eps``) is read as exact nilpotency and gives 0.
    """
    m = np.asarray(m, dtype=np.complex128)
    norm = operator_norm(m)
    if norm == 0.0:
        return 0.0
    current = m / norm
    log_norm = math.log(norm)  # log ||m^(2^k)||
    estimate = norm
    for k in range(max_squarings):
        square = current @ current
        s = operator_norm(square)
        if s == 0.0:
            return 0.0
        log_norm = 2.0 * log_norm + math.log(s)
        new_estimate = math.exp(log_norm / 2.0 ** (k + 1))
        current = square / s
        # a nilpotent matrix can keep ||m^(2^k)|| flat until 2^k reaches the dimension
        power = 2 ** (k + 1)
        past_dim = power >= m.shape[0]
        if past_dim and power < 2 * m.shape[0]:
            # m^n = 0 for a nilpotent m; in floating point it is only roundoff-small
            nil_rtol = NILPOTENT_EPS_FACTOR * m.shape[0] * power * np.finfo(float).eps
            if log_norm - power * math.log(norm) <= math.log(nil_rtol):
                return 0.0
        if past_dim and abs(new_estimate - estimate) <= tol.spec_tol * max(new_estimate, estimate):
            return new_estimate
        if new_estimate <= tol.spec_tol * norm * 1e-3:
            # the estimates are non-increasing in k, so the limit is already negligible
            return new_estimate
        estimate = new_estimate
    raise NoConvergence(f"spectral radius did not stabilise after {max_squarings} squarings")


@dataclass(frozen=True)
class SpectralReport:
    op_norm: float
    spectral_radius: float
    sigma_min: float
    power_norms: list = field(default_factory=list)


def spectral_report(m: np.ndarray, n_max: int = 8, tol: Tolerances = DEFAULT_TOL) -> SpectralReport:
    m = as_matrix(m)
    norms = []
    p = np.eye(m.shape[0], dtype=np.complex128)
    for n in range(1, n_max + 1):
        p = p @ m
        norms.append((n, operator_norm(p)))
    return SpectralReport(operator_norm(m), spectral_radius(m, tol), sigma_min(m), norms)


def _psd_eigh(h: np.ndarray, tol: Tolerances):
    w, v = hermitian_eigh(h, tol)
    if w[0] < -tol.psd_tol:
        raise NotPSD(float(w[0]))
    return np.clip(w, 0.0, None), v


def hermitian_power(h: np.ndarray, p: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``h^p`` for PSD ``h``; eigenvalues within psd_tol below zero are clamped."""
    if not p > 0:
        raise ValueError("power must be positive")
    w, v = _psd_eigh(h, tol)
    return herm((v * w**p) @ adjoint(v))


def hermitian_sqrt(h: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return hermitian_power(h, 0.5, tol)


def hermitian_log(h: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    w, v = hermitian_eigh(h, tol)
    if w[0] <= tol.psd_tol:
        raise NotPositiveDefinite(float(w[0]))
    return herm((v * np.log(w)) @ adjoint(v))


def hermitian_exp(h: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    w, v = hermitian_eigh(h, tol)
    return herm((v * np.exp(w)) @ adjoint(v))
