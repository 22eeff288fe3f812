import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindblad_dimer import (
    DegeneracyError,
    DensityMatrix,
    DimerParams,
    NetworkSpec,
    OverdampedWarning,
    dimer_eigensystem,
    dimer_hamiltonian,
    make_dimer,
    verify_biorthonormality,
)

deltas = st.floats(0, 3)
gammas = st.floats(0, 1.9)


def test_make_dimer_symmetric():
    spec = make_dimer(DimerParams(e1=0, delta=0, v=1, gamma=1))
    np.testing.assert_array_equal(spec.couplings, [[0, -1], [-1, 0]])
    assert spec.traps == ((1, 1.0),)


def test_make_dimer_offset_lowers_node2():
    spec = make_dimer(DimerParams(e1=0, delta=1.5, v=1, gamma=1))
    np.testing.assert_array_equal(np.diag(spec.couplings), [0, -1.5])


def test_make_dimer_delta_sign_flag():
    spec = make_dimer(DimerParams(e1=0, delta=1.5, gamma=1, delta_sign="node2_high"))
    np.testing.assert_array_equal(np.diag(spec.couplings), [0, 1.5])


def test_zero_trap_rate_gives_empty_trap_set():
    spec = make_dimer(DimerParams(e1=5, delta=0, v=1, gamma=0))
    assert spec.traps == ()
    np.testing.assert_array_equal(spec.couplings, [[5, -1], [-1, 5]])
    with pytest.raises(ValueError):
        NetworkSpec(2, spec.couplings, [(1, 0.0)])


@pytest.mark.parametrize(
    "kwargs",
    [dict(v=0), dict(v=-1), dict(delta=-0.1), dict(gamma=-1), dict(lam=-1),
     dict(delta_sign="up"), dict(gamma=float("nan"))],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ValueError):
        DimerParams(**kwargs)


def test_overdamped_is_flagged_not_fatal():
    with pytest.warns(OverdampedWarning):
        params = DimerParams(gamma=2.5)
    assert params.overdamped
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not DimerParams(gamma=2.0).overdamped


@pytest.mark.parametrize(
    "n, couplings, traps",
    [
        (2, [[0, 1], [2, 0]], []),
        (2, np.zeros((3, 3)), []),
        (2, np.zeros((2, 2)), [(2, 1.0)]),
        (2, np.zeros((2, 2)), [(0, 1.0), (0, 2.0)]),
        (0, np.zeros((0, 0)), []),
    ],
)
def test_network_spec_validation(n, couplings, traps):
    with pytest.raises(ValueError):
        NetworkSpec(n, couplings, traps)


def test_density_matrix_validation():
    DensityMatrix.localized(3, 2)
    with pytest.raises(ValueError):
        DensityMatrix([[1, 0.1], [0.2, 0]])
    with pytest.raises(ValueError):
        DensityMatrix(1.1 * np.eye(1))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.0, -0.5]))
    rho = DensityMatrix.pure(np.array([1, 1j]) / np.sqrt(2))
    assert rho.trace == pytest.approx(1.0)


def test_eigensystem_symmetric_hermitian_dimer():
    eig = dimer_eigensystem(DimerParams(delta=0, gamma=0, v=1, e1=0))
    assert eig.phi_delta == 0
    assert eig.e_plus == pytest.approx(1)
    assert eig.e_minus == pytest.approx(-1)
    # with -v off the diagonal the antisymmetric state is the upper level
    np.testing.assert_allclose(eig.right_plus, np.array([1, -1]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(eig.right_minus, np.array([1, 1]) / np.sqrt(2), atol=1e-15)
    assert verify_biorthonormality(eig) < 1e-14


def test_eigensystem_exceptional_point():
    with pytest.raises(DegeneracyError):
        dimer_eigensystem(DimerParams(delta=0, gamma=2, v=1))
    phi = np.arcsinh(-1j)
    assert phi == pytest.approx(-0.5j * np.pi)


def test_eigensystem_matches_dense_solver():
    params = DimerParams(delta=1.5, gamma=1, v=1, e1=0)
    eig = dimer_eigensystem(params)
    assert eig.e_plus + eig.e_minus == pytest.approx(-1.5 - 1j, abs=1e-10)
    e2 = params.e2
    assert eig.e_plus * eig.e_minus == pytest.approx(params.e1 * e2 - 1j * params.e1 * params.gamma - 1, abs=1e-10)
    dense = np.linalg.eigvals(dimer_hamiltonian(params))
    ours = np.array([eig.e_plus, eig.e_minus])
    np.testing.assert_allclose(np.sort_complex(ours), np.sort_complex(dense), atol=1e-12)
    assert verify_biorthonormality(eig) < 1e-10


def test_eigensystem_node2_high_uses_printed_angle():
    params = DimerParams(delta=1.5, gamma=1, delta_sign="node2_high")
    eig = dimer_eigensystem(params)
    assert eig.phi_delta == pytest.approx(np.arcsinh((1.5 - 1j) / 2))
    assert eig.e_plus + eig.e_minus == pytest.approx(1.5 - 1j)


def test_near_exceptional_conditioning():
    eig = dimer_eigensystem(DimerParams(delta=0, gamma=1.999, v=1))
    assert verify_biorthonormality(eig) < 1e-6


@settings(max_examples=100, deadline=None)
@given(deltas, gammas, st.floats(-2, 2))
def test_sum_rule(delta, gamma, e1):
    params = DimerParams(e1=e1, delta=delta, v=1, gamma=gamma)
    eig = dimer_eigensystem(params)
    assert abs(eig.e_plus + eig.e_minus - (params.e1 + params.e2 - 1j * gamma)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(deltas, gammas, st.sampled_from(["node1_high", "node2_high"]))
def test_eigenvector_residuals(delta, gamma, sign):
    params = DimerParams(delta=delta, gamma=gamma, delta_sign=sign)
    eig = dimer_eigensystem(params)
    h = dimer_hamiltonian(params)
    assert np.max(np.abs(h @ eig.right_plus - eig.e_plus * eig.right_plus)) < 1e-9
    assert np.max(np.abs(h @ eig.right_minus - eig.e_minus * eig.right_minus)) < 1e-9
    # left vectors are eigenvectors of the adjoint
    assert np.max(np.abs(h.conj().T @ eig.left_plus - np.conj(eig.e_plus) * eig.left_plus)) < 1e-9
    assert verify_biorthonormality(eig) < 1e-9


@settings(max_examples=50, deadline=None)
@given(deltas, st.floats(0.1, 3), st.floats(-2, 2))
def test_hermitian_limit(delta, v, e1):
    eig = dimer_eigensystem(DimerParams(e1=e1, delta=delta, v=v, gamma=0))
    assert abs(eig.e_plus.imag) < 1e-10 and abs(eig.e_minus.imag) < 1e-10
    np.testing.assert_allclose(eig.left_plus, eig.right_plus, atol=1e-10)
    np.testing.assert_allclose(eig.left_minus, eig.right_minus, atol=1e-10)
