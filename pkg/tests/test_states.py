import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qutrit_teleport import linalg, states
from qutrit_teleport.errors import DegenerateInputError, DomainError, StructureError
from qutrit_teleport.linalg import Ket
from qutrit_teleport.states import ChannelKind, Provenance

W, W2 = oracles.W, oracles.W2
R3 = 1 / math.sqrt(3)


def phi_from(amps):
    return Ket((3,), amps)


def test_unknown_qutrit():
    assert np.array_equal(states.unknown_qutrit(1, 0, 0).amplitudes, [1, 0, 0])
    assert states.unknown_qutrit(R3, R3, R3).norm == pytest.approx(1, abs=1e-15)
    assert states.unknown_qutrit(0.6, 0.8j, 0).is_normalized()
    with pytest.raises(DegenerateInputError):
        states.unknown_qutrit(0, 0, 0)
    with pytest.raises(DomainError):
        states.unknown_qutrit(1, 1, 0)
    assert states.unknown_qutrit(1, 1, 0, normalize=True).is_normalized()


def test_channels():
    u = states.channel(ChannelKind.U).amplitudes
    assert np.flatnonzero(u).tolist() == [0, 4, 8]
    assert np.allclose(u[[0, 4, 8]], R3, atol=1e-16)
    nu = states.channel("nu").amplitudes
    assert nu[0] == pytest.approx(-2 / math.sqrt(6))
    assert nu[4] == nu[8] == pytest.approx(1 / math.sqrt(6))
    assert states.channel("nu").norm == pytest.approx(1, abs=1e-15)


def test_leslie_matches_transcribed_table():
    for k in range(9):
        assert np.max(np.abs(states.leslie_state(k).amplitudes - oracles.leslie_vector(k))) <= 1e-15


def test_leslie_examples():
    assert np.allclose(states.leslie_state(0).amplitudes, states.channel("u").amplitudes, atol=1e-16)
    psi3 = states.leslie_state(3).amplitudes
    assert np.flatnonzero(psi3).tolist() == [1, 5, 6]
    assert np.allclose(psi3[[1, 5, 6]], R3)
    # phase ordering on the t = 1 term
    assert states.leslie_state(1).amplitudes[4] == pytest.approx(W * R3)
    assert states.leslie_state(2).amplitudes[4] == pytest.approx(W2 * R3)
    with pytest.raises(DomainError):
        states.leslie_state(9)
    with pytest.raises(DomainError):
        states.leslie_state(-1)


def test_leslie_orthonormal_and_complete():
    m = states.leslie_matrix()
    # Gram matrix summed term by term
    gram = np.array([[sum(np.conj(m[i, x]) * m[j, x] for x in range(9)) for j in range(9)] for i in range(9)])
    assert np.max(np.abs(gram - np.eye(9))) <= 1e-12
    completeness = sum(np.outer(v, v.conj()) for v in m)
    assert np.max(np.abs(completeness - np.eye(9))) <= 1e-12


def test_computational_from_leslie_examples():
    terms = states.computational_from_leslie(0, 0)
    assert [k for k, _ in terms] == [0, 1, 2]
    assert all(abs(c - R3) <= 1e-15 for _, c in terms)

    terms = dict(states.computational_from_leslie(2, 1))
    assert sorted(terms) == [6, 7, 8]
    assert terms[6] == pytest.approx(R3)
    assert terms[7] == pytest.approx(W * R3)
    assert terms[8] == pytest.approx(W2 * R3)


@pytest.mark.parametrize("b,c", [(b, c) for b in range(3) for c in range(3)])
def test_reexpression_reconstructs_and_matches_printed(b, c):
    terms = states.computational_from_leslie(b, c)
    assert len(terms) == 3
    assert all(abs(abs(coeff) - R3) <= 1e-15 for _, coeff in terms)
    rebuilt = sum(coeff * states.leslie_state(k).amplitudes for k, coeff in terms)
    assert np.linalg.norm(rebuilt - Ket.basis((b, c)).amplitudes) <= 1e-12
    printed = dict(states.PRINTED_REEXPRESSION[(b, c)])
    assert set(printed) == {k for k, _ in terms}
    for k, coeff in terms:
        assert abs(printed[k] - coeff) <= 1e-12


@pytest.mark.parametrize("kind", ["u", "nu"])
@pytest.mark.parametrize("k", range(9))
def test_collapsed_state_matches_brute_force(kind, k, rng):
    for _ in range(5):
        amps = oracles.random_qutrit_amps(rng)
        got = states.collapsed_state(kind, k, phi_from(amps)).amplitudes
        assert np.max(np.abs(got - oracles.brute_projection(amps, kind, k))) <= 1e-15


def test_collapsed_state_examples(rng):
    a, b, c = oracles.random_qutrit_amps(rng)
    phi = phi_from([a, b, c])
    s0 = states.collapsed_state("u", 0, phi).amplitudes
    assert np.allclose(s0, np.array([a, b, c]) / 3, atol=1e-15)
    q0 = states.collapsed_state("nu", 0, phi).amplitudes
    assert np.allclose(q0, np.array([-2 * a, b, c]) / math.sqrt(18), atol=1e-15)
    # outcome 4 of NU: -2w gamma, alpha, w^2 beta (printed form has a stray 1/2 on beta)
    q4 = states.rescaled_collapsed_state("nu", 4, phi).amplitudes
    assert np.allclose(q4, [-2 * W * c, a, W2 * b], atol=1e-14)
    printed_q4 = states.printed_collapsed_state("nu", 4, phi).amplitudes
    assert abs(printed_q4[2] - W2 * b / 2) <= 1e-15


def test_branch_prefactors():
    assert states.branch_prefactor("u") == pytest.approx(1 / 3, abs=1e-15)
    assert states.branch_prefactor("nu") == pytest.approx(1 / math.sqrt(18), abs=1e-15)


@pytest.mark.parametrize("k", range(9))
def test_printed_u_states_agree_with_projection(k):
    scaled = states.branch_transfer("u", k) * 3
    assert np.max(np.abs(scaled - states.printed_transfer("u", k))) <= 1e-14


def test_printed_nu_state_discrepancies():
    mismatched = [
        k
        for k in range(9)
        if np.max(np.abs(states.branch_transfer("nu", k) * math.sqrt(18) - states.printed_transfer("nu", k))) > 1e-12
    ]
    assert mismatched == [3, 4]


def test_paper_correction_examples():
    assert np.array_equal(states.paper_correction("u", 0).op, np.eye(3))
    u4 = np.zeros((3, 3), dtype=complex)
    u4[0, 1], u4[1, 2], u4[2, 0] = 1, W, W2
    assert np.max(np.abs(states.paper_correction("u", 4).op - u4)) <= 1e-15
    nu6 = np.zeros((3, 3), dtype=complex)
    nu6[0, 2], nu6[1, 0], nu6[2, 1] = 1, -0.5, 1
    op = states.paper_correction("nu", 6)
    assert np.array_equal(op.op, nu6)
    assert op.provenance is Provenance.PAPER


def test_synthesize_examples():
    op = states.synthesize_correction("u", 0)
    assert np.allclose(op.op, np.eye(3), atol=1e-15)
    assert op.provenance is Provenance.SYNTHESIZED
    assert np.allclose(states.synthesize_correction("nu", 0).op, np.diag([-0.5, 1, 1]), atol=1e-15)
    nu1 = states.synthesize_correction("nu", 1).op
    # inverts (-2, w^2, w): (-1/2, w^-2, w^-1) = (-1/2, w, w^2), already sigma_max = 1
    assert np.allclose(nu1, np.diag([-0.5, W, W2]), atol=1e-15)
    assert not np.allclose(nu1, states.paper_correction("nu", 1).op)


@pytest.mark.parametrize("k", range(9))
def test_synthesized_u_equals_printed_up_to_phase(k):
    printed = states.paper_correction("u", k).op
    synth = states.synthesize_correction("u", k).op
    assert states.align_global_phase(printed, synth) <= 1e-12


@pytest.mark.parametrize("kind", ["u", "nu"])
@pytest.mark.parametrize("k", range(9))
def test_synthesized_retrieves_positive_multiple(kind, k, rng):
    op = states.synthesize_correction(kind, k).op
    coeffs = []
    for _ in range(100):
        amps = oracles.random_qutrit_amps(rng)
        raw = states.collapsed_state(kind, k, phi_from(amps)).amplitudes
        out = op @ raw
        c = np.vdot(amps, out)
        assert np.linalg.norm(out - c * amps) <= 1e-10
        coeffs.append(c)
    coeffs = np.array(coeffs)
    assert np.all(np.abs(coeffs.imag) <= 1e-12)
    assert np.all(coeffs.real > 0)
    assert np.ptp(coeffs.real) <= 1e-12


@pytest.mark.parametrize("kind", ["u", "nu"])
@pytest.mark.parametrize("prov", list(Provenance))
def test_all_corrections_monomial(kind, prov):
    for k in range(9):
        assert states.is_monomial(states.correction(kind, k, prov).op)


def test_correction_operator_rejects_non_monomial():
    with pytest.raises(StructureError):
        states.CorrectionOperator(ChannelKind.U, 0, np.ones((3, 3)), Provenance.PAPER)


def test_probe_set_is_deterministic():
    a, b = states.probe_states(), states.probe_states()
    assert len(a) == 24
    assert all(np.array_equal(x.amplitudes, y.amplitudes) for x, y in zip(a, b))
    assert all(p.is_normalized() for p in a)


def test_audit_u_all_exact():
    entries = states.audit_retrievals("u")
    assert all(e.holds_exactly and e.holds_proportionally for e in entries)


def test_audit_nu_printed_findings():
    entries = states.audit_retrievals("nu")
    assert entries[0].holds_exactly
    assert not entries[1].holds_proportionally
    # hand check of outcome 1: printed NU1 maps q1 to (2 alpha, 2 w beta, w^2 gamma)
    a, b, c = 0.6, 0.8j, 0.0
    q1 = np.array([-2 * a, W2 * b, W * c])
    out = states.paper_correction("nu", 1).op @ q1
    assert np.allclose(out, [2 * a, 2 * W * b, W2 * c])
    exact = [e.outcome for e in entries if e.holds_exactly]
    assert exact == [0, 3, 6]
    for e in entries:
        assert e.holds_proportionally >= e.holds_exactly


def test_audit_nu_against_printed_states():
    entries = states.audit_retrievals("nu", Provenance.PAPER, "printed")
    # the printed +2 gamma in q3 breaks the otherwise valid NU3
    assert [e.outcome for e in entries if e.holds_exactly] == [0, 6]


def test_audit_target_validation():
    with pytest.raises(DomainError):
        states.audit_entry(states.paper_correction("u", 0), target="nonsense")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["u", "nu"]))
def test_projection_linearity(seed, kind):
    rng = np.random.default_rng(seed)
    x, y = oracles.random_qutrit_amps(rng), oracles.random_qutrit_amps(rng)
    z = complex(*rng.standard_normal(2))
    for k in range(9):
        lhs = states.collapsed_state(kind, k, phi_from(x + z * y)).amplitudes
        rhs = states.collapsed_state(kind, k, phi_from(x)).amplitudes + z * states.collapsed_state(kind, k, phi_from(y)).amplitudes
        assert np.max(np.abs(lhs - rhs)) <= 1e-14


def test_haar_qutrit_normalized(rng):
    for _ in range(10):
        assert states.haar_qutrit(rng).is_normalized()


def test_inner_with_channel_orthogonality():
    assert abs(linalg.inner(states.leslie_state(0), states.channel("nu"))) <= 1e-15
