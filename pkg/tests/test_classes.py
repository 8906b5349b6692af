import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lamcomm.classes import (
    CLASS_IDS,
    INAPPLICABLE,
    MEMBER,
    NONMEMBER,
    ClassParams,
    chain_violations,
    classify,
    family_matrices,
    _Operator,
    minimal_M_constant,
    restrict_to_invariant,
)
from lamcomm.errors import NotInvariant, NotOrthonormal
from lamcomm.linalg import DEFAULT_TOL, adjoint
from lamcomm.pairs import ginibre, random_unitary
from lamcomm.suite import random_matrix

X = np.array([[0, 1], [1, 0]], dtype=complex)
J2 = np.array([[0, 1], [0, 0]], dtype=complex)
CHAIN_CLASSES = tuple(c for c in CLASS_IDS if c != "k_hyponormal")


def verdicts(report):
    return {cid: e.verdict for cid, e in report.entries.items()}


def test_pauli_x_profile():
    r = classify(X)
    for cid in ("self_adjoint", "unitary", "normal", "quasinormal", "binormal", "hyponormal", "class_A",
                "paranormal", "star_paranormal", "quasi_star_paranormal", "normaloid"):
        assert r.member(cid), cid
        assert r.margin(cid) == pytest.approx(0.0, abs=1e-8)
    assert r["quasinilpotent"].verdict == NONMEMBER
    assert r["positive"].verdict == NONMEMBER
    assert r.margin("positive") == pytest.approx(-1.0, abs=1e-12)


def test_j2_profile():
    r = classify(J2)
    hyp = r["hyponormal"]
    assert hyp.verdict == NONMEMBER
    assert hyp.margin == pytest.approx(-1.0, abs=1e-9)
    assert abs(hyp.witness.vector[0]) == pytest.approx(1.0)
    qsp = r["quasi_star_paranormal"]
    assert qsp.verdict == NONMEMBER
    assert abs(qsp.witness.vector[1]) == pytest.approx(1.0)
    assert qsp.witness.violation == pytest.approx(1.0, abs=1e-8)
    assert r.member("quasinilpotent")
    assert r["normaloid"].verdict == NONMEMBER
    assert r.margin("normaloid") == pytest.approx(-1.0, abs=1e-8)
    assert r["positive"].verdict == INAPPLICABLE
    assert r["log_hyponormal"].verdict == INAPPLICABLE


def test_diag_profile():
    r = classify(np.diag([1.0, 2.0]))
    for cid, v in verdicts(r).items():
        if cid in ("isometry", "unitary", "quasinilpotent"):
            assert v == NONMEMBER, cid
        elif cid == "subnormal":
            assert v == INAPPLICABLE
        else:
            assert v == MEMBER, cid
    assert minimal_M_constant(np.diag([1.0, 2.0])) == 1.0


def test_zero_and_identity():
    z = classify(np.zeros((3, 3)))
    for cid, v in verdicts(z).items():
        if cid in ("isometry", "unitary"):
            assert v == NONMEMBER
        elif cid not in ("subnormal", "log_hyponormal"):
            assert v == MEMBER, cid
    eye = classify(np.eye(3))
    assert all(v in (MEMBER, INAPPLICABLE) for cid, v in verdicts(eye).items() if cid != "quasinilpotent")


def test_class_params_validate():
    with pytest.raises(ValueError):
        ClassParams(p=1.5)
    with pytest.raises(ValueError):
        ClassParams(k=1)
    with pytest.raises(ValueError):
        ClassParams(M=0.5)


def test_m_hyponormal_respects_m():
    T = np.array([[1, 0], [1, 1]], dtype=complex)
    assert not classify(T, params=ClassParams(M=2.0), classes=["M_hyponormal"]).member("M_hyponormal")
    assert classify(T, params=ClassParams(M=2.7), classes=["M_hyponormal"]).member("M_hyponormal")


def test_minimal_m_constant_oracles():
    # max eigenvalue of (T*T)^-1 TT*: characteristic polynomial x^2 - 3x + 1
    T = np.array([[1, 0], [1, 1]], dtype=complex)
    G, H = adjoint(T) @ T, T @ adjoint(T)
    oracle = max(np.linalg.eigvals(np.linalg.solve(G, H)).real)
    assert minimal_M_constant(T) == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-8)
    assert minimal_M_constant(T) == pytest.approx(oracle, abs=1e-12)
    assert minimal_M_constant(J2) == math.inf
    assert minimal_M_constant(X) == 1.0
    assert minimal_M_constant(np.zeros((2, 2))) == 1.0


def test_restrict_examples():
    A1 = np.array([[1, 2], [3, 4]], dtype=complex)
    T = np.zeros((3, 3), dtype=complex)
    T[:2, :2], T[2, 2] = A1, 5
    np.testing.assert_allclose(restrict_to_invariant(T, np.eye(3)[:, :2]), A1)
    shift = np.roll(np.eye(3), 1, axis=0)
    np.testing.assert_allclose(restrict_to_invariant(shift, np.ones(3) / math.sqrt(3)), [[1.0]], atol=1e-15)
    with pytest.raises(NotInvariant):
        restrict_to_invariant(J2, np.array([0.0, 1.0]))
    with pytest.raises(NotOrthonormal):
        restrict_to_invariant(J2, np.array([2.0, 0.0]))


def test_witness_reproduces_violation():
    T = np.array([[1, 0], [1, 1]], dtype=complex)
    r = classify(T)
    op = _Operator(T, DEFAULT_TOL)
    for cid in ("paranormal", "star_paranormal", "quasi_star_paranormal", "hyponormal"):
        e = r[cid]
        if e.verdict != NONMEMBER:
            continue
        x = e.witness.vector
        assert np.linalg.norm(x) == pytest.approx(1.0, abs=DEFAULT_TOL.eq_tol)
        if cid == "hyponormal":
            value = np.vdot(x, (op.G - op.H) @ x).real / op.norm**2
        else:
            P, Q, R = family_matrices(op, cid)
            lam = e.params["argmin_lambda"]
            degree = 6 if cid == "quasi_star_paranormal" else 4
            value = np.vdot(x, (P - 2 * lam * Q + lam**2 * R) @ x).real / op.norm**degree
        # margins are normalised by the matching power of ||T||
        assert value <= -(abs(e.margin) - DEFAULT_TOL.psd_tol)
        assert e.witness.violation == pytest.approx(-e.margin)


def test_hyponormal_collapses_to_normal():
    rng = np.random.default_rng(0)
    for n in range(2, 7):
        for _ in range(20):
            r = classify(random_matrix(rng, n), classes=["hyponormal", "normal"])
            if r.member("hyponormal"):
                assert r.member("normal")


def test_chain_monotonicity_sample():
    rng = np.random.default_rng(11)
    for n in range(2, 6):
        for _ in range(15):
            assert chain_violations(classify(random_matrix(rng, n), classes=CHAIN_CLASSES)) == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_unitary_invariance(seed, n):
    rng = np.random.default_rng(seed)
    T = random_matrix(rng, n)
    U = random_unitary(n, rng)
    a = classify(T, classes=CHAIN_CLASSES)
    b = classify(adjoint(U) @ T @ U, classes=CHAIN_CLASSES)
    for cid in CHAIN_CLASSES:
        ea, eb = a[cid], b[cid]
        if ea.margin is not None and abs(ea.margin + ea.tol) < 1e-6:
            continue  # sitting on the tolerance boundary
        assert ea.verdict == eb.verdict, cid


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.floats(0.25, 4.0))
def test_scale_covariance(seed, n, c):
    rng = np.random.default_rng(seed)
    T = random_matrix(rng, n)
    # isometry and unitary pin the scale to 1
    wanted = tuple(cid for cid in CHAIN_CLASSES if cid not in ("isometry", "unitary"))
    a = classify(T, classes=wanted)
    b = classify(c * T, classes=wanted)
    for cid in wanted:
        ea, eb = a[cid], b[cid]
        if ea.margin is not None and abs(ea.margin + ea.tol) < 1e-6:
            continue  # sitting on the tolerance boundary
        assert ea.verdict == eb.verdict, cid
        if ea.margin is not None:
            assert eb.margin == pytest.approx(ea.margin, abs=1e-6), cid


def test_small_scale_non_member_stays_non_member():
    r = classify(0.02 * J2, classes=["quasi_star_paranormal", "hyponormal", "paranormal"])
    assert r["quasi_star_paranormal"].verdict == NONMEMBER
    assert r.margin("hyponormal") == pytest.approx(-1.0)
    assert not r.member("paranormal")


def test_scale_covariance_of_quasinilpotent():
    J = np.eye(4, k=1)
    assert classify(1e-6 * J, classes=["quasinilpotent"]).member("quasinilpotent")
    assert not classify(1e-6 * np.eye(4), classes=["quasinilpotent"]).member("quasinilpotent")


def test_k_hyponormal_on_known_examples():
    params = ClassParams(k=3)
    assert classify(random_unitary(4, 0), params=params, classes=["k_hyponormal"]).member("k_hyponormal")
    assert not classify(J2, params=params, classes=["k_hyponormal"]).member("k_hyponormal")


def test_classify_rejects_unknown_class():
    with pytest.raises(KeyError):
        classify(X, classes=["nosuch"])
