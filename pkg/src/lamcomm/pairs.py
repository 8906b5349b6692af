"""Constructors and certification for pairs with ``AB = lam * BA``."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .errors import BadRecipe, DegeneratePair, MismatchedLambda, NotLambdaCommuting, ZeroScale
from .linalg import DEFAULT_TOL, Tolerances, adjoint, as_matrix, fro, operator_norm


@dataclass(frozen=True)
class CommutationCertificate:
    lam: complex
    modulus: float
    residual: float
    ab_nonzero: bool
    root_order: int | None = None

    def valid(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.residual <= tol.eq_tol


def _root_order(lam: complex, dim: int, tol: Tolerances) -> int | None:
    power = 1.0 + 0.0j
    for m in range(1, dim * dim + 1):
        power *= lam
        if abs(power - 1.0) <= tol.eq_tol:
            return m
    return None


def extract_lambda(A, B, tol: Tolerances = DEFAULT_TOL) -> CommutationCertificate:
    """Least-squares ``lam`` minimising ``||AB - lam BA||_F``, certified.

    The residual is normalised by ``||A|| ||B|| sqrt(dim)``. Raises
    ``DegeneratePair`` when AB and BA both vanish and ``NotLambdaCommuting``
    when no scalar fits within eq_tol.
    """
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    n = A.shape[0]
    scale = operator_norm(A) * operator_norm(B)
    AB, BA = A @ B, B @ A
    ab, ba = fro(AB), fro(BA)
    if scale == 0.0 or (ab <= tol.eq_tol * scale and ba <= tol.eq_tol * scale):
        raise DegeneratePair("AB and BA both vanish; lambda is unconstrained")
    if ba <= tol.eq_tol * scale:
        raise NotLambdaCommuting("BA vanishes while AB does not; no lambda exists")
    lam = complex(np.vdot(BA, AB) / np.vdot(BA, BA).real)
    residual = fro(AB - lam * BA) / (scale * math.sqrt(n))
    if residual > tol.eq_tol:
        raise NotLambdaCommuting(f"relative residual {residual:.3e} exceeds eq_tol", residual)
    return CommutationCertificate(lam, abs(lam), residual, ab > tol.eq_tol * scale, _root_order(lam, n, tol))


def try_extract_lambda(A, B, tol: Tolerances = DEFAULT_TOL):
    """``extract_lambda`` returning ``(certificate or None, reason)``."""
    try:
        return extract_lambda(A, B, tol), ""
    except (DegeneratePair, NotLambdaCommuting) as exc:
        return None, str(exc)


def clock_shift_pair(n: int, tol: Tolerances = DEFAULT_TOL):
    """Cyclic shift and clock matrix with ``AB = omega BA``, omega = exp(2 pi i/n)."""
    if int(n) != n or n < 2:
        raise BadRecipe("clock_shift needs n >= 2")
    n = int(n)
    omega = cmath.exp(2j * math.pi / n)
    A = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        A[(j - 1) % n, j] = 1.0  # A e_j = e_{j-1}
    B = np.diag(omega ** np.arange(n)).astype(np.complex128)
    return A, B, extract_lambda(A, B, tol)


def scaled_pair(A, B, cert, alpha: complex, beta: complex, tol: Tolerances = DEFAULT_TOL):
    if alpha == 0 or beta == 0:
        raise ZeroScale("scale factors must be nonzero")
    sA, sB = alpha * as_matrix(A), beta * as_matrix(B)
    new = extract_lambda(sA, sB, tol)
    return sA, sB, new


def direct_sum_pair(pairs, tol: Tolerances = DEFAULT_TOL):
    if not pairs:
        raise BadRecipe("direct sum of zero pairs")
    lam0 = pairs[0][2].lam
    for _, _, cert in pairs[1:]:
        if abs(cert.lam - lam0) > tol.eq_tol:
            raise MismatchedLambda(f"lambda {cert.lam} differs from {lam0}")
    A = block_diag(*[p[0] for p in pairs]).astype(np.complex128)
    B = block_diag(*[p[1] for p in pairs]).astype(np.complex128)
    return A, B, extract_lambda(A, B, tol)


# single-matrix generators


def jordan_block(n: int, a: complex = 0.0) -> np.ndarray:
    return (a * np.eye(n) + np.eye(n, k=1)).astype(np.complex128)


def weighted_shift(weights) -> np.ndarray:
    """Truncated forward shift ``T e_j = w_j e_{j+1}``."""
    w = np.asarray(weights, dtype=np.complex128)
    return np.diag(w, k=-1)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(n: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar unitary: QR of a Ginibre matrix with the phases of R's diagonal removed."""
    q, r = np.linalg.qr(ginibre(n, seed))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_normal(n: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    U = random_unitary(n, rng)
    return (U * z) @ adjoint(U)


def random_contraction(n: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    G = ginibre(n, rng)
    return G * (rng.uniform(0.5, 1.0) / operator_norm(G))


def diagonal_commuting_pair(n: int, seed=None, tol: Tolerances = DEFAULT_TOL):
    """Two invertible diagonal matrices (lam = 1)."""
    rng = _rng(seed)

    def diag():
        return np.diag(rng.uniform(0.5, 2.0, n) * np.exp(2j * math.pi * rng.uniform(size=n)))

    A, B = diag(), diag()
    return A, B, extract_lambda(A, B, tol)


def conjugate(M: np.ndarray, U: np.ndarray) -> np.ndarray:
    """``U* M U``."""
    return adjoint(U) @ M @ U


PAIR_FAMILIES = ("clock_shift", "scaled", "direct_sum", "diagonal_commuting", "custom")
MATRIX_FAMILIES = ("jordan_block", "weighted_shift", "random_unitary", "random_normal", "random_contraction")


@dataclass(frozen=True)
class PairRecipe:
    family: str
    dim: int = 2
    params: dict = field(default_factory=dict)
    seed: int | None = None


def parse_family_spec(spec: str) -> PairRecipe:
    """``"clock_shift:4"`` -> recipe; ``"direct_sum:clock_shift:2,clock_shift:2"`` is also accepted."""
    name, _, rest = spec.partition(":")
    if name == "direct_sum":
        parts = [parse_family_spec(s) for s in rest.split(",") if s]
        return PairRecipe("direct_sum", sum(p.dim for p in parts), {"of": parts})
    dim = int(rest) if rest else 2
    return PairRecipe(name, dim)


def make_instance(recipe: PairRecipe, tol: Tolerances = DEFAULT_TOL):
    """Build the matrices described by ``recipe``.

    Pair families return ``(A, B, certificate)``; single-matrix families
    return one matrix. Output is a deterministic function of the recipe.
    """
    fam, n, p = recipe.family, recipe.dim, recipe.params
    try:
        if fam == "clock_shift":
            return clock_shift_pair(n, tol)
        if fam == "scaled":
            base = p.get("base", PairRecipe("clock_shift", n))
            A, B, cert = make_instance(base, tol)
            return scaled_pair(A, B, cert, complex(p.get("alpha", 1.0)), complex(p.get("beta", 1.0)), tol)
        if fam == "direct_sum":
            parts = p.get("of")
            if not parts:
                raise BadRecipe("direct_sum needs a non-empty 'of' list")
            return direct_sum_pair([make_instance(r, tol) for r in parts], tol)
        if fam == "diagonal_commuting":
            return diagonal_commuting_pair(n, recipe.seed, tol)
        if fam == "custom":
            A, B = as_matrix(p["A"]), as_matrix(p["B"])
            return A, B, extract_lambda(A, B, tol)
        if fam == "jordan_block":
            return jordan_block(n, complex(p.get("a", 0.0)))
        if fam == "weighted_shift":
            weights = p.get("weights", [1.0] * (n - 1))
            if len(weights) != n - 1:
                raise BadRecipe("weighted_shift needs dim - 1 weights")
            return weighted_shift(weights)
        if fam == "random_unitary":
            return random_unitary(n, recipe.seed)
        if fam == "random_normal":
            return random_normal(n, recipe.seed)
        if fam == "random_contraction":
            return random_contraction(n, recipe.seed)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (BadRecipe, MismatchedLambda, ZeroScale, NotLambdaCommuting, DegeneratePair)):
            raise
        raise BadRecipe(f"invalid parameters for {fam!r}: {exc}") from exc
    raise BadRecipe(f"unknown family {fam!r}")
