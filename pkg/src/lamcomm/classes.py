"""Membership predicates for the operator classes.

Every predicate returns a signed margin. PSD-type classes report the
smallest eigenvalue of the defining difference divided by the matching
power of ||T||; identity-type classes report a negated residual relative to
the norms of the factors. Either way a margin does not change under T -> cT.
A class holds iff ``margin >= -tol`` for the class's own tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .engines import FamilyCheckResult, family_psd_min, sphere_min
from .errors import NotInvariant, NotOrthonormal
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    adjoint,
    as_matrix,
    cogram,
    fro,
    gram,
    herm,
    operator_norm,
    rel,
    sigma_min,
    spectral_radius,
)

MEMBER = "member"
NONMEMBER = "nonmember"
INAPPLICABLE = "inapplicable"

CLASS_IDS = (
    "positive",
    "self_adjoint",
    "isometry",
    "normal",
    "unitary",
    "quasinormal",
    "binormal",
    "subnormal",
    "hyponormal",
    "M_hyponormal",
    "p_hyponormal",
    "class_A",
    "paranormal",
    "k_hyponormal",
    "star_paranormal",
    "quasi_star_paranormal",
    "log_hyponormal",
    "p_quasihyponormal",
    "normaloid",
    "quasinilpotent",
)


@dataclass(frozen=True)
class ClassParams:
    p: float = 0.5
    k: int = 2
    M: float = 2.0
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError("p must lie in (0, 1]")
        if int(self.k) != self.k or self.k < 2:
            raise ValueError("k must be an integer >= 2")
        if not self.M >= 1:
            raise ValueError("M must be >= 1")


@dataclass(frozen=True)
class Witness:
    vector: np.ndarray
    violation: float


@dataclass(frozen=True)
class ClassEntry:
    class_id: str
    verdict: str
    margin: float | None
    tol: float
    method: str
    witness: Witness | None = None
    params: dict | None = None
    note: str = ""

    @property
    def member(self) -> bool:
        return self.verdict == MEMBER


@dataclass(frozen=True)
class ClassReport:
    dim: int
    entries: dict = field(default_factory=dict)

    def __getitem__(self, class_id: str) -> ClassEntry:
        return self.entries[class_id]

    def member(self, class_id: str) -> bool:
        return self.entries[class_id].member

    def margin(self, class_id: str) -> float | None:
        return self.entries[class_id].margin


def _gram_fn(g: np.ndarray, fn) -> np.ndarray:
    # g is a Gram matrix, hence PSD by construction: tiny negative eigenvalues are roundoff
    w, v = np.linalg.eigh(g)
    return herm((v * fn(np.clip(w, 0.0, None))) @ adjoint(v))


class _Operator:
    """Lazily cached products of one matrix."""

    def __init__(self, T: np.ndarray, tol: Tolerances):
        self.T = T
        self.tol = tol
        self.n = T.shape[0]

    @cached_property
    def Ts(self):
        return adjoint(self.T)

    @cached_property
    def G(self):
        return gram(self.T)

    @cached_property
    def H(self):
        return cogram(self.T)

    @cached_property
    def T2(self):
        return self.T @ self.T

    @cached_property
    def norm(self):
        return operator_norm(self.T)

    @cached_property
    def radius(self):
        return spectral_radius(self.T, self.tol)

    def gram_power(self, p: float):
        return _gram_fn(self.G, lambda w: w**p), _gram_fn(self.H, lambda w: w**p)


def _scaled(value: float, op: "_Operator", degree: float) -> float:
    """Divide by ``||T||^degree`` so margins are invariant under T -> cT."""
    scale = op.norm**degree
    return value / scale if scale > 0 else value


def _psd_entry(cid: str, D: np.ndarray, tol: Tolerances, method: str, params=None,
               op: "_Operator | None" = None, degree: float = 0.0) -> ClassEntry:
    w, v = np.linalg.eigh(herm(D))
    margin = float(w[0]) if op is None else _scaled(float(w[0]), op, degree)
    if margin >= -tol.psd_tol:
        return ClassEntry(cid, MEMBER, margin, tol.psd_tol, method, params=params)
    return ClassEntry(cid, NONMEMBER, margin, tol.psd_tol, method, Witness(v[:, 0], -margin), params)


def _family_entry(cid: str, fam: FamilyCheckResult, tol: Tolerances, method: str,
                  op: "_Operator", degree: float) -> ClassEntry:
    margin = _scaled(fam.min_margin, op, degree)
    details = {"argmin_lambda": fam.argmin_lambda, "bracket": list(fam.bracket)}
    if margin >= -tol.psd_tol:
        return ClassEntry(cid, MEMBER, margin, tol.psd_tol, method, params=details)
    return ClassEntry(cid, NONMEMBER, margin, tol.psd_tol, method, Witness(fam.witness, -margin), details)


def _residual_entry(cid: str, margin: float, tol: float, method: str) -> ClassEntry:
    margin = margin + 0.0  # no negative zero in reports
    return ClassEntry(cid, MEMBER if margin >= -tol else NONMEMBER, margin, tol, method)


def family_matrices(op: _Operator, cid: str):
    """The (P, Q, R) triple whose family decides ``cid``."""
    if cid == "paranormal":
        return gram(op.T2), op.G, np.eye(op.n)
    if cid == "star_paranormal":
        return gram(op.T2), op.H, np.eye(op.n)
    if cid == "quasi_star_paranormal":
        P = herm(op.Ts @ gram(op.T2) @ op.T)
        Q = herm(op.Ts @ op.H @ op.T)
        return P, Q, op.G
    raise KeyError(cid)


def family_lambda_max(op: _Operator) -> float:
    """Bound on ``x*Qx / x*Rx`` shared by the three families.

    The ratio is ``||Tx||^2``, ``||T*x||^2`` or ``||T*y||^2`` (with y = Tx)
    over ``||x||^2`` or ``||y||^2``, so it never exceeds ``||T||^2``.
    """
    return op.norm**2


def k_hyponormal_objective(T: np.ndarray, k: int):
    """Batched ``x -> (||T^k x|| - ||T x||^k) / ||T||^k`` on unit vectors."""
    Tk = np.linalg.matrix_power(T, k)
    scale = operator_norm(T) ** k
    scale = scale if scale > 0 else 1.0

    def objective(X):
        return (np.linalg.norm(Tk @ X, axis=0) - np.linalg.norm(T @ X, axis=0) ** k) / scale

    return objective


def k_hyponormal_margin(T: np.ndarray, k: int, restarts: int = 8, seed: int = 0):
    T = np.asarray(T, dtype=np.complex128)
    return sphere_min(k_hyponormal_objective(T, k), T.shape[0], restarts=restarts, seed=seed)


def _evaluate(cid: str, op: _Operator, tol: Tolerances, params: ClassParams) -> ClassEntry:
    T, n = op.T, op.n
    if cid == "self_adjoint":
        return _residual_entry(cid, -rel(fro(T - op.Ts), op.norm), tol.psd_tol, "relative ||T - T*||_F")
    if cid == "positive":
        sa = _evaluate("self_adjoint", op, tol, params)
        if not sa.member:
            return ClassEntry(cid, INAPPLICABLE, None, tol.psd_tol, "psd margin of T",
                              note="T is not Hermitian, so <Tx,x> is not real for all x")
        return _psd_entry(cid, herm(T), tol, "psd margin of T / ||T||", op=op, degree=1)
    if cid == "isometry":
        return _residual_entry(cid, -fro(op.G - np.eye(n)), tol.psd_tol, "||T*T - I||_F")
    if cid == "unitary":
        margin = -max(fro(op.G - np.eye(n)), fro(op.H - np.eye(n)))
        return _residual_entry(cid, margin, tol.psd_tol, "max(||T*T - I||_F, ||TT* - I||_F)")
    if cid == "normal":
        return _residual_entry(cid, -rel(fro(op.G - op.H), op.norm**2), tol.psd_tol, "relative ||T*T - TT*||_F")
    if cid == "quasinormal":
        res = fro(T @ op.G - op.G @ T)
        return _residual_entry(cid, -rel(res, op.norm**3), tol.psd_tol, "relative ||T(T*T) - (T*T)T||_F")
    if cid == "binormal":
        res = fro(op.G @ op.H - op.H @ op.G)
        return _residual_entry(cid, -rel(res, op.norm**4), tol.psd_tol, "relative ||[T*T, TT*]||_F")
    if cid == "subnormal":
        return ClassEntry(cid, INAPPLICABLE, None, tol.psd_tol, "none",
                          note="normal-extension test is not implemented")
    if cid == "hyponormal":
        return _psd_entry(cid, op.G - op.H, tol, "psd margin of (T*T - TT*) / ||T||^2", op=op, degree=2)
    if cid == "M_hyponormal":
        return _psd_entry(cid, params.M * op.G - op.H, tol, "psd margin of (M T*T - TT*) / ||T||^2",
                          {"M": params.M}, op, 2)
    if cid == "p_hyponormal":
        Gp, Hp = op.gram_power(params.p)
        return _psd_entry(cid, Gp - Hp, tol, "psd margin of ((T*T)^p - (TT*)^p) / ||T||^2p",
                          {"p": params.p}, op, 2 * params.p)
    if cid == "p_quasihyponormal":
        Gp, Hp = op.gram_power(params.p)
        D = op.Ts @ (Gp - Hp) @ T
        return _psd_entry(cid, D, tol, "psd margin of T*[(T*T)^p - (TT*)^p]T / ||T||^(2+2p)",
                          {"p": params.p}, op, 2 + 2 * params.p)
    if cid == "class_A":
        abs_T2 = _gram_fn(gram(op.T2), np.sqrt)
        return _psd_entry(cid, abs_T2 - op.G, tol, "psd margin of (|T^2| - |T|^2) / ||T||^2", op=op, degree=2)
    if cid in ("paranormal", "star_paranormal", "quasi_star_paranormal"):
        fam = family_psd_min(*family_matrices(op, cid), tol, lam_max=family_lambda_max(op))
        degree = 6 if cid == "quasi_star_paranormal" else 4
        return _family_entry(cid, fam, tol, f"family_psd_min / ||T||^{degree}", op, degree)
    if cid == "k_hyponormal":
        value, x = k_hyponormal_margin(T, params.k, params.restarts, params.seed)
        p = {"k": params.k}
        note = "sphere search: membership is evidence only"
        if value >= -tol.psd_tol:
            return ClassEntry(cid, MEMBER, value, tol.psd_tol, "sphere_min", params=p, note=note)
        return ClassEntry(cid, NONMEMBER, value, tol.psd_tol, "sphere_min", Witness(x, -value), p, note)
    if cid == "log_hyponormal":
        if sigma_min(T) <= tol.psd_tol:
            return ClassEntry(cid, INAPPLICABLE, None, tol.psd_tol, "psd margin of log(T*T) - log(TT*)",
                              note="T is not invertible")
        D = _gram_fn(op.G, np.log) - _gram_fn(op.H, np.log)
        return _psd_entry(cid, D, tol, "psd margin of log(T*T) - log(TT*)")
    if cid == "normaloid":
        margin = -rel(abs(op.norm - op.radius), op.norm)
        return _residual_entry(cid, margin, tol.margin_gate * tol.spec_tol, "relative | ||T|| - r(T) |")
    if cid == "quasinilpotent":
        margin = -rel(op.radius, op.norm)
        return _residual_entry(cid, margin, max(tol.spec_tol, tol.psd_tol), "r(T) / ||T||")
    raise KeyError(f"unknown class id {cid!r}")


def classify(T, tol: Tolerances = DEFAULT_TOL, params: ClassParams | None = None, classes=None) -> ClassReport:
    """Evaluate the requested class predicates (all of them by default)."""
    T = as_matrix(T)
    params = params or ClassParams()
    wanted = CLASS_IDS if classes is None else tuple(classes)
    for cid in wanted:
        if cid not in CLASS_IDS:
            raise KeyError(f"unknown class id {cid!r}")
    op = _Operator(T, tol)
    return ClassReport(T.shape[0], {cid: _evaluate(cid, op, tol, params) for cid in wanted})


# (stronger, weaker, needs_invertible) implications between classes
CHAINS = (
    ("self_adjoint", "normal", False),
    ("normal", "quasinormal", False),
    ("quasinormal", "hyponormal", False),
    ("hyponormal", "star_paranormal", False),
    ("star_paranormal", "quasi_star_paranormal", False),
    ("quasinormal", "binormal", False),
    ("hyponormal", "p_hyponormal", False),
    ("p_hyponormal", "p_quasihyponormal", False),
    ("p_quasihyponormal", "class_A", False),
    ("class_A", "paranormal", False),
    ("p_hyponormal", "log_hyponormal", True),
    ("log_hyponormal", "paranormal", True),
)


def chain_violations(report: ClassReport, tol: Tolerances = DEFAULT_TOL) -> list:
    """Implications whose stronger class holds clearly while the weaker fails.

    "Clearly" means a margin of at least ``-class_tol / margin_gate``: the
    equality-type classes never have positive margins, so the gate sits
    inside the member band rather than above zero.
    """
    bad = []
    for strong, weak, needs_inv in CHAINS:
        if strong not in report.entries or weak not in report.entries:
            continue
        s, w = report[strong], report[weak]
        if w.verdict == INAPPLICABLE and needs_inv:
            continue
        if s.member and s.margin >= -s.tol / tol.margin_gate and not w.member:
            bad.append((strong, weak, s.margin, w.margin))
    return bad


def minimal_M_constant(T, tol: Tolerances = DEFAULT_TOL) -> float:
    """Least ``M >= 1`` with ``TT* <= M T*T``, or ``inf`` if none exists.

    Computed on the range of T*T as the norm of
    ``(T*T)^(-1/2) TT* (T*T)^(-1/2)``.
    """
    T = as_matrix(T)
    G, H = gram(T), cogram(T)
    w, v = np.linalg.eigh(G)
    top = float(w[-1])
    if top == 0.0:
        return 1.0
    keep = w > tol.psd_tol * top
    vr, wr = v[:, keep], w[keep]
    outside = H - vr @ (adjoint(vr) @ H)
    if operator_norm(outside) > tol.psd_tol * top:
        return math.inf
    scale = 1.0 / np.sqrt(wr)
    S = herm((adjoint(vr) @ H @ vr) * scale[:, None] * scale[None, :])
    return max(1.0, float(np.linalg.eigvalsh(S)[-1]))


def restrict_to_invariant(T, basis, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Matrix ``V* T V`` of T restricted to the span of the orthonormal columns V."""
    T = as_matrix(T)
    V = np.asarray(basis, dtype=np.complex128)
    if V.ndim == 1:
        V = V[:, None]
    if V.ndim != 2 or V.shape[0] != T.shape[0] or V.shape[1] == 0:
        raise ValueError(f"basis shape {V.shape} does not match dimension {T.shape[0]}")
    ortho = fro(adjoint(V) @ V - np.eye(V.shape[1]))
    if ortho > tol.eq_tol:
        raise NotOrthonormal(ortho)
    TV = T @ V
    residual = fro(TV - V @ (adjoint(V) @ TV))
    if residual > tol.eq_tol * max(operator_norm(T), 1e-300):
        raise NotInvariant(residual)
    return adjoint(V) @ TV
