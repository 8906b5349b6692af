"""Executable checks of the lemmas and theorems on concrete matrices.

Each verifier evaluates the premises as signed margins, evaluates the
conclusion, and returns a ``TheoremVerdict`` whose status is one of
``confirmed``, ``vacuous`` (some premise fails) or ``violated``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .classes import classify, k_hyponormal_margin, minimal_M_constant, restrict_to_invariant
from .errors import InvalidCertificate, UnknownTheorem
from .pairs import try_extract_lambda
from .linalg import DEFAULT_TOL, Tolerances, adjoint, cogram, fro, gram, operator_norm, rel, sigma_min, spectral_radius

CONFIRMED = "confirmed"
VACUOUS = "vacuous"
VIOLATED = "violated"

THEOREMS = (
    "power_identity",
    "modulus",
    "fuglede_putnam",
    "quasinormal_product",
    "binormal_product",
    "k_hyponormal_product",
    "lambda_bounds",
    "M_product",
    "normaloid_lemma",
    "restriction_lemma",
)


@dataclass
class TheoremVerdict:
    theorem_id: str
    premise_margins: dict
    premise_tols: dict
    conclusion_margin: float | None
    conclusion_tol: float
    status: str
    inputs_digest: str
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    one_sided: bool = False


def inputs_digest(*arrays, **extra) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(a, dtype=np.complex128))
        h.update(repr(a.shape).encode())
        h.update(a.tobytes())
    h.update(json.dumps(extra, sort_keys=True, default=str).encode())
    return h.hexdigest()[:16]


def _decide(theorem_id, premises, conclusion, tol, digest, notes=None, details=None, one_sided=False):
    """Apply the confirmed / vacuous / violated rules.

    ``premises`` maps a name to ``(margin, tol)``; a premise holds iff its
    margin is not None and ``>= -tol``. Violation needs the conclusion to
    fail by more than ``margin_gate`` times its tolerance; anything between
    that and ``-tol`` is confirmed with a noise-band note.
    """
    notes = list(notes or [])
    margin, ctol = conclusion
    failing = [name for name, (m, t) in premises.items() if m is None or m < -t]
    if failing:
        status = VACUOUS
        notes.append("premises not met: " + ", ".join(failing))
    elif margin is None:
        status = VACUOUS
        notes.append("conclusion could not be evaluated")
    elif margin < -tol.margin_gate * ctol:
        status = VIOLATED
    else:
        status = CONFIRMED
        if margin < -ctol:
            notes.append("conclusion inside the noise band")
    return TheoremVerdict(
        theorem_id,
        {k: v[0] for k, v in premises.items()},
        {k: v[1] for k, v in premises.items()},
        margin,
        ctol,
        status,
        digest,
        notes,
        dict(details or {}),
        one_sided,
    )


def _class_premise(report, cid):
    entry = report[cid]
    return (entry.margin, entry.tol)


def _pair_scale(A, B):
    return operator_norm(A) * operator_norm(B)


def _certificate_premises(A, B, tol, notes):
    """Premises for ``AB = lam BA != 0``; returns ``(premises, certificate)``."""
    cert, reason = try_extract_lambda(A, B, tol)
    premises = {}
    if cert is None:
        notes.append(reason)
        premises["lambda_commuting"] = (None, tol.eq_tol)
    else:
        premises["lambda_commuting"] = (-cert.residual, tol.eq_tol)
    scale = _pair_scale(A, B)
    premises["AB_nonzero"] = (rel(fro(A @ B), scale) - tol.eq_tol, 0.0)
    return premises, cert


def _require_certificate(A, B, cert, tol):
    if cert is None:
        cert, reason = try_extract_lambda(A, B, tol)
        if cert is None:
            raise InvalidCertificate(reason)
    if not cert.valid(tol):
        raise InvalidCertificate(f"certificate residual {cert.residual:.3e} exceeds eq_tol")
    return cert


def _as_pair(A, B):
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    return A, B


def verify_power_identity(A, B, cert=None, k_max: int = 6, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """``(AB)^k = lam^(k(k-1)/2) B^(k-1) A^k B`` for k = 1..k_max.

    Each residual is normalised by ``||A||^k ||B||^k sqrt(dim)``. The margin
    is measured against the error the certificate residual can propagate
    through the k(k-1)/2 uses of the relation.
    """
    A, B = _as_pair(A, B)
    cert = _require_certificate(A, B, cert, tol)
    n = A.shape[0]
    lam, rho = cert.lam, cert.residual
    nA, nB = operator_norm(A), operator_norm(B)
    AB = A @ B
    lhs = np.eye(n, dtype=np.complex128)
    Ak = np.eye(n, dtype=np.complex128)
    Bk1 = np.eye(n, dtype=np.complex128)  # B^(k-1)
    residuals, margins = [], []
    for k in range(1, k_max + 1):
        lhs = lhs @ AB
        Ak = Ak @ A
        if k > 1:
            Bk1 = Bk1 @ B
        swaps = k * (k - 1) // 2
        rhs = lam**swaps * (Bk1 @ Ak @ B)
        res = rel(fro(lhs - rhs), (nA * nB) ** k * math.sqrt(n))
        propagated = rho * sum(abs(lam) ** j for j in range(swaps))
        residuals.append(res)
        margins.append(propagated - res)
    premises = {"lambda_commuting": (-rho, tol.eq_tol)}
    details = {"residuals": residuals, "lambda": lam, "k_max": k_max}
    return _decide("power_identity", premises, (min(margins), tol.eq_tol), tol,
                   inputs_digest(A, B, k_max=k_max), details=details)


def verify_modulus_theorem(A, B, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """Hyponormal invertible A, quasi *-paranormal B, AB = lam BA != 0 gives |lam| = 1.

    Only the invertible branch is checked. The other branch splits A as
    [[A1, 0], [A2, 0]] over closure(R(A*)) + N(A); hyponormality forces
    A2 = 0 and then B is block diagonal, reducing to the invertible case on
    the first block. In finite dimensions every spectral point is isolated,
    so that branch carries no extra finite-dimensional content.
    """
    A, B = _as_pair(A, B)
    notes = []
    ra = classify(A, tol, classes=["hyponormal"])
    rb = classify(B, tol, classes=["quasi_star_paranormal"])
    premises = {
        "A_hyponormal": _class_premise(ra, "hyponormal"),
        "B_quasi_star_paranormal": _class_premise(rb, "quasi_star_paranormal"),
    }
    cert_premises, cert = _certificate_premises(A, B, tol, notes)
    premises.update(cert_premises)
    smin = sigma_min(A)
    premises["A_invertible"] = (smin - tol.psd_tol, 0.0)
    conclusion = -abs(cert.modulus - 1.0) if cert is not None else None
    details = {"lambda": cert.lam if cert else None, "sigma_min_A": smin}
    return _decide("modulus", premises, (conclusion, tol.psd_tol), tol, inputs_digest(A, B), notes, details)


def verify_fuglede_putnam(A, B, cert=None, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """Normal B and AB = lam BA imply BA* = lam A*B and AB* = conj(lam) B*A."""
    A, B = _as_pair(A, B)
    cert = _require_certificate(A, B, cert, tol)
    lam = cert.lam
    As, Bs = adjoint(A), adjoint(B)
    scale = _pair_scale(A, B) * math.sqrt(A.shape[0])
    r1 = rel(fro(B @ As - lam * As @ B), scale)
    r2 = rel(fro(A @ Bs - np.conj(lam) * Bs @ A), scale)
    rb = classify(B, tol, classes=["normal"])
    premises = {"B_normal": _class_premise(rb, "normal"), "lambda_commuting": (-cert.residual, tol.eq_tol)}
    details = {"residual_BAs": r1, "residual_ABs": r2, "lambda": lam}
    return _decide("fuglede_putnam", premises, (-max(r1, r2), tol.eq_tol), tol, inputs_digest(A, B),
                   details=details)


def _unimodular_premise(cert, tol):
    if cert is None:
        return (None, tol.psd_tol)
    return (-abs(cert.modulus - 1.0), tol.psd_tol)


def _product_theorem(theorem_id, A_class, conclusion_class, A, B, tol):
    A, B = _as_pair(A, B)
    notes = []
    ra = classify(A, tol, classes=[A_class])
    rb = classify(B, tol, classes=["normal"])
    premises = {f"A_{A_class}": _class_premise(ra, A_class), "B_normal": _class_premise(rb, "normal")}
    cert_premises, cert = _certificate_premises(A, B, tol, notes)
    premises.update(cert_premises)
    premises["lambda_unimodular"] = _unimodular_premise(cert, tol)
    rab = classify(A @ B, tol, classes=[conclusion_class])
    margin, ctol = _class_premise(rab, conclusion_class)
    details = {"lambda": cert.lam if cert else None}
    return _decide(theorem_id, premises, (margin, ctol), tol, inputs_digest(A, B), notes, details)


def verify_quasinormal_product(A, B, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """Quasinormal A, normal B, |lam| = 1 make AB quasinormal."""
    return _product_theorem("quasinormal_product", "quasinormal", "quasinormal", A, B, tol)


def verify_binormal_product(A, B, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """Binormal A, normal B, |lam| = 1 make AB binormal."""
    return _product_theorem("binormal_product", "binormal", "binormal", A, B, tol)


def verify_k_hyponormal_product(A, B, k: int = 2, tol: Tolerances = DEFAULT_TOL, seed: int = 0,
                                restarts: int = 8) -> TheoremVerdict:
    """k-hyponormal A, isometric B, |lam| = 1 make AB k-hyponormal.

    k-hyponormality has no finite certificate here, so both the premise on A
    and the conclusion are sphere-search evidence (one-sided).
    """
    A, B = _as_pair(A, B)
    notes = []
    a_value, _ = k_hyponormal_margin(A, k, restarts, seed)
    rb = classify(B, tol, classes=["isometry"])
    premises = {"A_k_hyponormal": (a_value, tol.psd_tol), "B_isometry": _class_premise(rb, "isometry")}
    cert_premises, cert = _certificate_premises(A, B, tol, notes)
    premises.update(cert_premises)
    premises["lambda_unimodular"] = _unimodular_premise(cert, tol)
    AB = A @ B
    ab_value, _ = k_hyponormal_margin(AB, k, restarts, seed)
    radius = spectral_radius(AB, tol)
    verdict = _decide("k_hyponormal_product", premises, (ab_value, tol.psd_tol), tol,
                      inputs_digest(A, B, k=k), notes, {"k": k, "spectral_radius_AB": radius}, one_sided=True)
    if verdict.status == CONFIRMED and radius <= tol.psd_tol:
        verdict.status = VIOLATED
        verdict.notes.append("AB is k-hyponormal but its spectrum is {0}")
    return verdict


def _bound_constants(A, B, tol):
    return {
        "M1": minimal_M_constant(adjoint(A), tol),
        "M2": minimal_M_constant(B, tol),
        "M1_mirror": minimal_M_constant(A, tol),
        "M2_mirror": minimal_M_constant(adjoint(B), tol),
    }


def _finite_premise(*values):
    return (0.0, 0.0) if all(math.isfinite(v) for v in values) else (-math.inf, 0.0)


def verify_lambda_bounds(A, B, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """``(M1 M2)^(-1/2) <= |lam| <= (M1 M2)^(1/2)`` with minimal constants.

    Upper bound: A* is M1-hyponormal, B is M2-hyponormal. Lower bound: the
    mirrored constants of A and B*. A bound whose constants are infinite is
    skipped; the corollary case is flagged when every constant is 1.
    """
    A, B = _as_pair(A, B)
    notes = []
    c = _bound_constants(A, B, tol)
    premises = {"constants_finite": _finite_premise(c["M1"], c["M2"])}
    cert_premises, cert = _certificate_premises(A, B, tol, notes)
    premises.update(cert_premises)
    margins = []
    details = dict(c)
    if cert is not None:
        mod = cert.modulus
        if math.isfinite(c["M1"] * c["M2"]):
            upper = math.sqrt(c["M1"] * c["M2"])
            details["upper_bound"] = upper
            margins.append(upper - mod)
        if math.isfinite(c["M1_mirror"] * c["M2_mirror"]):
            lower = 1.0 / math.sqrt(c["M1_mirror"] * c["M2_mirror"])
            details["lower_bound"] = lower
            margins.append(mod - lower)
        else:
            notes.append("lower bound skipped: mirrored constant is infinite")
        details["lambda"] = cert.lam
    details["corollary"] = all(abs(v - 1.0) <= tol.psd_tol for v in c.values())
    conclusion = min(margins) if margins else None
    return _decide("lambda_bounds", premises, (conclusion, tol.psd_tol), tol, inputs_digest(A, B), notes, details)


def verify_M_product_theorem(A, B, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """A*B and BA* are M1 M2 |lam|^2-hyponormal."""
    A, B = _as_pair(A, B)
    notes = []
    M1 = minimal_M_constant(adjoint(A), tol)
    M2 = minimal_M_constant(B, tol)
    premises = {"constants_finite": _finite_premise(M1, M2)}
    cert_premises, cert = _certificate_premises(A, B, tol, notes)
    premises.update(cert_premises)
    details = {"M1": M1, "M2": M2}
    conclusion = None
    if cert is not None and math.isfinite(M1 * M2):
        const = M1 * M2 * cert.modulus**2
        details["constant"] = const
        margins = {}
        for name, T in (("AsB", adjoint(A) @ B), ("BAs", B @ adjoint(A))):
            margins[name] = float(np.linalg.eigvalsh(const * gram(T) - cogram(T))[0])
        details["margins"] = margins
        conclusion = min(margins.values())
    return _decide("M_product", premises, (conclusion, tol.psd_tol), tol, inputs_digest(A, B), notes, details)


def verify_normaloid_lemma(T, n_max: int = 8, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """Quasi *-paranormal T is normaloid, and T = 0 when it is quasinilpotent.

    Three checks: ||T^n|| = ||T||^n for n = 3..n_max (relative eq_tol * n),
    |r(T) - ||T||| <= spec_tol ||T||, and ||T|| <= 10 spec_tol whenever
    r(T) <= spec_tol ||T||. The conclusion margin is in units of each
    check's tolerance, so ``conclusion_tol`` is 1.
    """
    T = np.asarray(T, dtype=np.complex128)
    rep = classify(T, tol, classes=["quasi_star_paranormal"])
    premises = {"T_quasi_star_paranormal": _class_premise(rep, "quasi_star_paranormal")}
    norm = operator_norm(T)
    radius = spectral_radius(T, tol)
    power_res = []
    P = T @ T
    for n in range(3, n_max + 1):
        P = P @ T
        power_res.append(rel(abs(operator_norm(P) - norm**n), norm**n))
    scores = [res / (tol.eq_tol * n) for n, res in zip(range(3, n_max + 1), power_res)]
    gap = rel(abs(radius - norm), norm)
    scores.append(gap / tol.spec_tol)
    quasinilpotent = radius <= tol.spec_tol * norm or norm == 0.0
    if quasinilpotent:
        scores.append(norm / (10.0 * tol.spec_tol))
    details = {"norm": norm, "spectral_radius": radius, "power_residuals": power_res,
               "radius_gap": gap, "quasinilpotent": quasinilpotent}
    return _decide("normaloid_lemma", premises, (-max(scores), 1.0), tol, inputs_digest(T, n_max=n_max),
                   details=details)


def verify_restriction_lemma(T, basis, tol: Tolerances = DEFAULT_TOL) -> TheoremVerdict:
    """The restriction of a quasi *-paranormal T to an invariant subspace stays so."""
    T = np.asarray(T, dtype=np.complex128)
    R = restrict_to_invariant(T, basis, tol)
    rep = classify(T, tol, classes=["quasi_star_paranormal"])
    rr = classify(R, tol, classes=["quasi_star_paranormal"])
    premises = {"T_quasi_star_paranormal": _class_premise(rep, "quasi_star_paranormal")}
    margin, ctol = _class_premise(rr, "quasi_star_paranormal")
    return _decide("restriction_lemma", premises, (margin, ctol), tol, inputs_digest(T, basis),
                   details={"restricted_dim": R.shape[0]})


def verify(theorem_id: str, A, B=None, *, basis=None, k: int = 2, k_max: int = 6, n_max: int = 8,
           tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> TheoremVerdict:
    """Run one verifier by id.

    Certificate failures for the verifiers that need one become vacuous
    verdicts instead of exceptions.
    """
    if theorem_id not in THEOREMS:
        raise UnknownTheorem(theorem_id)
    if theorem_id == "normaloid_lemma":
        return verify_normaloid_lemma(A, n_max, tol)
    if theorem_id == "restriction_lemma":
        if basis is None:
            raise ValueError("restriction_lemma needs a basis")
        return verify_restriction_lemma(A, basis, tol)
    if B is None:
        raise ValueError(f"{theorem_id} needs both A and B")
    if theorem_id in ("power_identity", "fuglede_putnam"):
        try:
            if theorem_id == "power_identity":
                return verify_power_identity(A, B, None, k_max, tol)
            return verify_fuglede_putnam(A, B, None, tol)
        except InvalidCertificate as exc:
            premises = {"lambda_commuting": (None, tol.eq_tol)}
            return _decide(theorem_id, premises, (None, tol.eq_tol), tol, inputs_digest(A, B), [str(exc)])
    if theorem_id == "modulus":
        return verify_modulus_theorem(A, B, tol)
    if theorem_id == "quasinormal_product":
        return verify_quasinormal_product(A, B, tol)
    if theorem_id == "binormal_product":
        return verify_binormal_product(A, B, tol)
    if theorem_id == "k_hyponormal_product":
        return verify_k_hyponormal_product(A, B, k, tol, seed)
    if theorem_id == "lambda_bounds":
        return verify_lambda_bounds(A, B, tol)
    return verify_M_product_theorem(A, B, tol)
