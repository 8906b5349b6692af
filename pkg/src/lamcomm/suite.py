"""Seeded batch runs of the verifiers and a counterexample search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnknownTheorem
from .harness import CONFIRMED, THEOREMS, VACUOUS, VIOLATED, TheoremVerdict, verify
from .linalg import DEFAULT_TOL, Tolerances, adjoint, operator_norm
from .pairs import (
    clock_shift_pair,
    conjugate,
    ginibre,
    jordan_block,
    random_contraction,
    random_normal,
    random_unitary,
    weighted_shift,
)


@dataclass(frozen=True)
class SuiteConfig:
    dims: tuple = (2, 3, 4, 5, 6, 7, 8)
    trials: int = 200
    seed: int = 42
    tol: Tolerances = DEFAULT_TOL
    theorems: tuple = THEOREMS
    pinned: tuple = ()  # (A, B) pairs that replace the generated instances
    random_instances: bool = True
    k: int = 2

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class TheoremTally:
    trials: int = 0
    confirmed: int = 0
    vacuous: int = 0
    violated: int = 0
    random_trials: int = 0
    random_non_vacuous: int = 0
    worst_margin: float | None = None  # raw conclusion margin of the worst trial
    worst_scaled: float | None = None  # the same margin in units of its tolerance
    worst_trial: int | None = None
    offender: dict | None = None

    @property
    def premise_hit_rate(self) -> float | None:
        if self.random_trials == 0:
            return None
        return self.random_non_vacuous / self.random_trials

    def add(self, trial: int, verdict: TheoremVerdict, instance: dict, random: bool):
        self.trials += 1
        if verdict.status == CONFIRMED:
            self.confirmed += 1
        elif verdict.status == VACUOUS:
            self.vacuous += 1
        else:
            self.violated += 1
            if self.offender is None:
                self.offender = {"trial": trial, "instance": instance, "verdict": verdict}
        if random:
            self.random_trials += 1
            self.random_non_vacuous += verdict.status != VACUOUS
        if verdict.status != VACUOUS and verdict.conclusion_margin is not None:
            scaled = verdict.conclusion_margin / verdict.conclusion_tol
            if self.worst_scaled is None or scaled < self.worst_scaled:
                self.worst_scaled = scaled
                self.worst_margin = verdict.conclusion_margin
                self.worst_trial = trial


@dataclass
class SuiteReport:
    seed: int
    dims: tuple
    trials: int
    tol: Tolerances
    theorems: dict = field(default_factory=dict)

    @property
    def violated(self) -> int:
        return sum(t.violated for t in self.theorems.values())

    @property
    def ok(self) -> bool:
        return self.violated == 0


def _rng(seed: int, *key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def _unit_phase(rng) -> complex:
    return complex(np.exp(2j * math.pi * rng.uniform()))


def _scalar(rng) -> complex:
    return rng.uniform(0.5, 2.0) * _unit_phase(rng)


def constructed_pair(rng, n: int, isometric_b: bool = False):
    """A lambda-commuting pair that satisfies every pair theorem's premises.

    Clock-shift pairs (possibly scaled, summed or swapped) and diagonal
    commuting pairs, all conjugated by one Haar unitary.
    """
    kind = rng.integers(4)
    if kind == 3:
        a = np.diag([_scalar(rng) for _ in range(n)])
        b = np.diag([_unit_phase(rng) if isometric_b else _scalar(rng) for _ in range(n)])
    else:
        divisors = [m for m in range(2, n) if n % m == 0]
        if kind == 2 and divisors:
            m = int(rng.choice(divisors))
            a1, b1, _ = clock_shift_pair(m)
            a = np.kron(np.eye(n // m), a1)
            b = np.kron(np.eye(n // m), b1)
        else:
            a, b, _ = clock_shift_pair(n)
        if kind >= 1:
            a = _scalar(rng) * a
            b = (_unit_phase(rng) if isometric_b else _scalar(rng)) * b
        if rng.uniform() < 0.5:
            a, b = b, a
            if isometric_b:
                b = b / operator_norm(b)
    U = random_unitary(n, rng)
    return conjugate(a, U), conjugate(b, U)


def random_matrix(rng, n: int) -> np.ndarray:
    kind = rng.integers(5)
    if kind == 0:
        return random_normal(n, rng)
    if kind == 1:
        return random_unitary(n, rng)
    if kind == 2:
        return jordan_block(n, complex(rng.choice([0.0, _scalar(rng)])))
    if kind == 3:
        return weighted_shift(rng.uniform(0.0, 2.0, n - 1))
    return random_contraction(n, rng)


def random_pair(rng, n: int):
    """Unstructured pairs; most of them fail some premise."""
    A = random_matrix(rng, n)
    kind = rng.integers(4)
    if kind == 0:
        B = random_matrix(rng, n)
    elif kind == 1:
        B = A.copy()
    elif kind == 2:
        B = A @ A
    else:
        B = adjoint(A)
    return A, B


def quasi_star_paranormal_matrix(rng, n: int) -> np.ndarray:
    kind = rng.integers(4)
    if kind == 0:
        return random_unitary(n, rng)
    if kind == 1:
        return conjugate(np.diag(rng.uniform(0.1, 3.0, n)).astype(np.complex128), random_unitary(n, rng))
    if kind == 2:
        return random_normal(n, rng)
    return np.zeros((n, n), dtype=np.complex128) if rng.uniform() < 0.5 else np.diag(rng.uniform(0.1, 3.0, n))


def invariant_instance(rng, n: int, structured: bool):
    """``(T, basis)`` with span(basis) invariant under T."""
    U = random_unitary(n, rng)
    m = int(rng.integers(1, n)) if n > 1 else 1
    if structured:
        if rng.uniform() < 0.5:
            z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            core = np.diag(z)  # eigenvector subspace of a normal matrix
        else:
            core = np.zeros((n, n), dtype=np.complex128)
            core[:m, :m] = quasi_star_paranormal_matrix(rng, m)
            core[m:, m:] = quasi_star_paranormal_matrix(rng, n - m)
    else:
        core = ginibre(n, rng)
        core[m:, :m] = 0.0  # block upper triangular keeps the first m coordinates invariant
    T = U @ core @ adjoint(U)
    return T, U[:, :m]


def _instance(theorem_id: str, rng, n: int, structured: bool, k: int) -> dict:
    if theorem_id == "normaloid_lemma":
        T = quasi_star_paranormal_matrix(rng, n) if structured else random_matrix(rng, n)
        if structured:
            U = random_unitary(n, rng)
            T = conjugate(T, U)
        return {"A": T}
    if theorem_id == "restriction_lemma":
        T, V = invariant_instance(rng, n, structured)
        return {"A": T, "basis": V}
    if structured:
        A, B = constructed_pair(rng, n, isometric_b=theorem_id == "k_hyponormal_product")
    else:
        A, B = random_pair(rng, n)
    return {"A": A, "B": B}


def _pinned_instance(theorem_id: str, pair) -> dict:
    A, B = (np.asarray(m, dtype=np.complex128) for m in pair)
    if theorem_id == "normaloid_lemma":
        return {"A": A}
    if theorem_id == "restriction_lemma":
        n = A.shape[0]
        T = np.zeros((2 * n, 2 * n), dtype=np.complex128)
        T[:n, :n], T[n:, n:] = A, B
        return {"A": T, "basis": np.eye(2 * n, n, dtype=np.complex128)}
    return {"A": A, "B": B}


def _run(theorem_id: str, inst: dict, config: SuiteConfig) -> TheoremVerdict:
    return verify(theorem_id, inst["A"], inst.get("B"), basis=inst.get("basis"), k=config.k, tol=config.tol)


def _perturb(rng, inst: dict, scale: float) -> dict:
    out = dict(inst)
    for key in ("A", "B"):
        if key in out:
            M = out[key]
            E = ginibre(M.shape[0], rng)
            out[key] = M + scale * max(operator_norm(M), 1.0) * E / operator_norm(E)
    return out


def run_suite(config: SuiteConfig) -> SuiteReport:
    """Run every verifier ``trials`` times over the configured dimensions.

    Each trial draws one premise-satisfying instance and, unless disabled,
    one unstructured instance whose non-vacuity rate is reported. Every
    trial has its own seed stream, so the report does not depend on order.
    """
    report = SuiteReport(config.seed, tuple(config.dims), config.trials, config.tol)
    for ti, theorem_id in enumerate(config.theorems):
        if theorem_id not in THEOREMS:
            raise UnknownTheorem(theorem_id)
        tally = TheoremTally()
        report.theorems[theorem_id] = tally
        if not config.dims and not config.pinned:
            continue
        for trial in range(config.trials):
            if config.pinned:
                inst = _pinned_instance(theorem_id, config.pinned[trial % len(config.pinned)])
                tally.add(trial, _run(theorem_id, inst, config), inst, False)
                continue
            n = int(config.dims[trial % len(config.dims)])
            inst = _instance(theorem_id, _rng(config.seed, ti, trial, 0), n, True, config.k)
            tally.add(trial, _run(theorem_id, inst, config), inst, False)
            if config.random_instances:
                inst = _instance(theorem_id, _rng(config.seed, ti, trial, 1), n, False, config.k)
                tally.add(trial, _run(theorem_id, inst, config), inst, True)
    return report


def counterexample_search(theorem_id: str, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL,
                          dims=(2, 3, 4, 5, 6)) -> SuiteReport:
    """Hunt for violated verdicts among near-premise-satisfying instances.

    Constructed instances are conjugated by Haar unitaries and perturbed by
    a log-uniform relative amount in [1e-15, eq_tol]; larger perturbations
    only turn premises vacuous.
    """
    if theorem_id not in THEOREMS:
        raise UnknownTheorem(theorem_id)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    config = SuiteConfig(dims=tuple(dims), trials=trials, seed=seed, tol=tol, theorems=(theorem_id,))
    report = SuiteReport(seed, tuple(dims), trials, tol)
    tally = TheoremTally()
    report.theorems[theorem_id] = tally
    ti = THEOREMS.index(theorem_id)
    for trial in range(trials):
        rng = _rng(seed, ti, trial, 2)
        n = int(dims[trial % len(dims)])
        inst = _instance(theorem_id, rng, n, True, config.k)
        if theorem_id != "restriction_lemma":
            inst = _perturb(rng, inst, 10.0 ** rng.uniform(-15.0, math.log10(tol.eq_tol)))
        tally.add(trial, _run(theorem_id, inst, config), inst, False)
    return report
