import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from groth_lhv.core import RandomSource, sample_sphere
from groth_lhv.errors import InconsistentCorrelation, InvalidArgument
from groth_lhv.quantum import (BELL_ORDER, X, Y, Z, BellDiagonalState, CorrelationData, DensityMatrix,
                               DichotomicObservable, NoisyState, WernerState, bell_diagonal_correlation,
                               bell_state, joint_correlation, maximally_entangled,
                               operator_from_dict, operator_to_dict, outcome_probability,
                               projective_qubit_observable, singlet)

seeds = st.integers(0, 2**32)


def test_singlet_correlation_is_minus_dot(gen):
    rho = DensityMatrix.pure(singlet())
    for _ in range(20):
        a, b = sample_sphere(gen, 3), sample_sphere(gen, 3)
        c = joint_correlation(rho, projective_qubit_observable(a), projective_qubit_observable(b))
        assert c.joint == pytest.approx(-np.dot(a, b), abs=1e-12)
        assert abs(c.marginal_a) < 1e-12 and abs(c.marginal_b) < 1e-12


def test_maximally_mixed_gives_zero():
    c = joint_correlation(DensityMatrix.maximally_mixed(2), X, Y)
    assert (c.joint, c.marginal_a, c.marginal_b) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 1.0])
def test_werner_zz(p):
    c = joint_correlation(WernerState(p), Z, Z)
    assert c.joint == pytest.approx(-p, abs=1e-12)


def test_werner_density_matches_mixture():
    p = 0.37
    psi = singlet()
    expect = p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(4) / 4
    assert np.max(np.abs(WernerState(p).density().matrix - expect)) <= 1e-12
    assert np.array_equal(WernerState(0).density().matrix, np.eye(4) / 4)


def test_noisy_state_matches_mixture():
    phi = maximally_entangled(3)
    base = DensityMatrix.pure(phi)
    rho = NoisyState(base, 0.4).density().matrix
    assert np.max(np.abs(rho - (0.4 * base.matrix + 0.6 * np.eye(9) / 9))) <= 1e-12


def test_density_matrix_validation():
    with pytest.raises(InvalidArgument):
        DensityMatrix(np.eye(4), (2, 2))  # trace 4
    with pytest.raises(InvalidArgument):
        DensityMatrix(np.diag([1.5, -0.5, 0, 0]), (2, 2))
    with pytest.raises(InvalidArgument):
        DensityMatrix(np.eye(4) / 4, (2, 3))
    with pytest.raises(InvalidArgument):
        WernerState(1.2)


def test_projective_observable_examples():
    assert np.array_equal(projective_qubit_observable([0, 0, 1]).op, np.diag([1, -1]))
    assert np.array_equal(projective_qubit_observable([1, 0, 0]).op, np.array([[0, 1], [1, 0]]))
    ev = np.linalg.eigvalsh(projective_qubit_observable(np.ones(3) / math.sqrt(3)).op)
    assert np.allclose(ev, [-1, 1], atol=1e-14)
    assert projective_qubit_observable([0, 1, 0]).traceless
    with pytest.raises(InvalidArgument):
        projective_qubit_observable([1, 0])


def test_observable_validation():
    with pytest.raises(InvalidArgument):
        DichotomicObservable(2 * Z)
    with pytest.raises(InvalidArgument):
        DichotomicObservable(np.array([[0, 1], [0, 0]]))
    assert not DichotomicObservable(np.eye(2)).traceless
    with pytest.raises(InvalidArgument):
        joint_correlation(WernerState(0.5), Z, np.eye(3))


def test_bell_diagonal_examples():
    p = 0.6
    w = WernerState(p).bell_diagonal()
    z = np.array([0, 0, 1.0])
    assert bell_diagonal_correlation(w, z, z).joint == pytest.approx(-p, abs=1e-15)
    phi_plus = BellDiagonalState((0, 0, 0, 1))
    assert tuple(phi_plus.correlations) == (1, -1, 1)
    assert bell_diagonal_correlation(phi_plus, z, z).joint == 1
    s = BellDiagonalState.from_correlations([0.0, 0.0, 0.5])
    assert bell_diagonal_correlation(s, [1, 0, 0], [1, 0, 0]).joint == 0.0


def test_bell_order_matches_triples():
    for name, probs in zip(BELL_ORDER, np.eye(4)):
        st_ = BellDiagonalState(tuple(probs))
        rho = DensityMatrix.pure(bell_state(name))
        t = [joint_correlation(rho, P, P).joint for P in (X, Y, Z)]
        assert np.allclose(t, st_.correlations, atol=1e-14)


@given(seeds)
@settings(max_examples=30)
def test_bell_diagonal_closed_form_matches_trace(seed):
    g = RandomSource(seed).generator()
    state = BellDiagonalState(tuple(g.dirichlet(np.ones(4))))
    a, b = sample_sphere(g, 3), sample_sphere(g, 3)
    full = joint_correlation(state, projective_qubit_observable(a), projective_qubit_observable(b))
    fast = bell_diagonal_correlation(state, a, b)
    assert full.joint == pytest.approx(fast.joint, abs=1e-12)
    assert abs(full.marginal_a) <= 1e-12 and abs(full.marginal_b) <= 1e-12
    # reduced states are maximally mixed
    r = state.density().matrix.reshape(2, 2, 2, 2)
    assert np.allclose(np.einsum("ijkj->ik", r), np.eye(2) / 2, atol=1e-12)
    assert np.allclose(np.einsum("ijil->jl", r), np.eye(2) / 2, atol=1e-12)


@given(seeds, st.floats(0, 1))
@settings(max_examples=30)
def test_correlation_affine_in_state(seed, p):
    g = RandomSource(seed).generator()
    psi = g.standard_normal(4) + 1j * g.standard_normal(4)
    base = DensityMatrix.pure(psi / np.linalg.norm(psi))
    A = projective_qubit_observable(sample_sphere(g, 3))
    B = projective_qubit_observable(sample_sphere(g, 3))
    mixed = joint_correlation(NoisyState(base, p), A, B)
    pure = joint_correlation(base, A, B)
    white = joint_correlation(DensityMatrix.maximally_mixed(2), A, B)
    for f in ("joint", "marginal_a", "marginal_b"):
        expect = p * getattr(pure, f) + (1 - p) * getattr(white, f)
        assert getattr(mixed, f) == pytest.approx(expect, abs=1e-10)


@given(seeds)
@settings(max_examples=30)
def test_outcome_probability_matches_projectors(seed):
    g = RandomSource(seed).generator()
    q = g.dirichlet(np.ones(4))
    M = g.standard_normal((4, 4)) + 1j * g.standard_normal((4, 4))
    rho = M @ M.conj().T
    rho = DensityMatrix(rho / np.trace(rho), (2, 2))
    A = projective_qubit_observable(sample_sphere(g, 3))
    B = projective_qubit_observable(sample_sphere(g, 3))
    corr = joint_correlation(rho, A, B)
    total = 0.0
    for al in (1, -1):
        for be in (1, -1):
            p = outcome_probability(corr, al, be)
            direct = np.trace(np.kron(A.projector(al), B.projector(be)) @ rho.matrix).real
            assert p == pytest.approx(direct, abs=1e-10)
            assert p >= -1e-10
            total += p
    assert total == pytest.approx(1, abs=1e-12)
    assert q.sum() == pytest.approx(1)


def test_outcome_probability_examples():
    assert outcome_probability(CorrelationData(-1.0), 1, 1) == 0
    assert outcome_probability(CorrelationData(0.0), -1, 1) == 0.25
    assert outcome_probability(CorrelationData(-0.5), 1, 1) == 0.125
    # projector arithmetic on the Werner state at p = 1/2
    rho = WernerState(0.5).density().matrix
    Pz = DichotomicObservable(Z).projector(1)
    assert np.trace(np.kron(Pz, Pz) @ rho).real == pytest.approx(0.125, abs=1e-15)
    with pytest.raises(InconsistentCorrelation):
        outcome_probability(CorrelationData(-1.0, 1.0, 1.0), -1, -1)
    with pytest.raises(InvalidArgument):
        CorrelationData(1.5)


def test_operator_serialization_round_trip(gen):
    M = gen.standard_normal((3, 3)) + 1j * gen.standard_normal((3, 3))
    d = operator_to_dict(M)
    assert d["dim"] == 3 and len(d["re"]) == 9
    assert d["re"][1] == M[0, 1].real
    assert np.array_equal(operator_from_dict(d), M)
    assert operator_to_dict(WernerState(0.2).density())["dim"] == 4
    with pytest.raises(InvalidArgument):
        operator_from_dict({"dim": 2, "re": [1, 2, 3]})
