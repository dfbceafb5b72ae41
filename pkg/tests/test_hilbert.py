import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from core.errors import EmptySectorError, HermiticityError, LabError
from core.hilbert import (
    Ket,
    LinOp,
    angular_momentum_residuals,
    eigenprojector,
    expand_in_basis,
    expect,
    inner,
    measure_projective,
    product_basis,
    singlet,
    spin_basis,
    spin_operator,
    tensor,
    total_spin,
)
from experiments.spin_epr import basis_swap

axes = st.sampled_from(["x", "y", "z"])
signs = st.sampled_from(["+", "-"])
hbars = st.floats(min_value=0.1, max_value=10.0)
amplitudes = st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False)


@given(hbars)
def test_angular_momentum_algebra(hbar):
    residuals = angular_momentum_residuals(hbar)
    assert set(residuals) == {"xy", "yz", "zx"}
    assert max(residuals.values()) <= 1e-12 * max(1.0, hbar ** 2)


@given(axes, signs, hbars)
def test_spin_basis_is_eigenvector(axis, sign, hbar):
    ket = spin_basis(axis, sign)
    eigenvalue = (0.5 if sign == "+" else -0.5) * hbar
    applied = spin_operator(axis, hbar=hbar) @ ket
    np.testing.assert_allclose(applied.amplitudes, eigenvalue * ket.amplitudes, atol=1e-12)
    assert ket.is_normalized


def test_singlet_in_z_basis():
    expected = np.array([0, 1, -1, 0]) / np.sqrt(2.0)
    np.testing.assert_allclose(singlet().amplitudes, expected, atol=1e-12)


def test_singlet_is_annihilated_by_total_spin():
    state = singlet()
    for axis in ("x", "y", "z"):
        assert (total_spin(axis) @ state).norm <= 1e-12


def test_yy_correlator_is_minus_quarter_hbar_squared():
    hbar = 2.0
    op = spin_operator("y", 1, hbar=hbar) @ spin_operator("y", 2, hbar=hbar)
    assert expect(op, singlet()) == pytest.approx(-0.25 * hbar ** 2, abs=1e-12)
    assert expect(spin_operator("y", 1, hbar=hbar), singlet()) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_product_basis_is_orthonormal(axis):
    basis = product_basis(axis)
    gram = np.array([[inner(a, b) for b in basis] for a in basis])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)


def test_expansion_reconstructs_state():
    basis = product_basis("y")
    state = tensor(spin_basis("z", "+"), spin_basis("z", "-"))
    coefficients = expand_in_basis(state, basis)
    rebuilt = sum(c * b.amplitudes for c, b in zip(coefficients, basis))
    np.testing.assert_allclose(rebuilt, state.amplitudes, atol=1e-12)


def test_projective_measurement_of_singlet():
    reduced, probability = measure_projective(singlet(), spin_operator("z", 1), 0.5)
    assert probability == pytest.approx(0.5, abs=1e-12)
    expected = tensor(spin_basis("z", "+"), spin_basis("z", "-"))
    assert abs(inner(expected, reduced)) == pytest.approx(1.0, abs=1e-12)


def test_projective_measurement_of_missing_outcome():
    state = tensor(spin_basis("z", "+"), spin_basis("z", "+"))
    with pytest.raises(EmptySectorError):
        measure_projective(state, spin_operator("z", 1), -0.5)


def test_eigenprojector_rejects_non_eigenvalue():
    with pytest.raises(LabError):
        eigenprojector(spin_operator("z", 1), 0.3)


def test_expect_rejects_non_hermitian_operator():
    raising = LinOp(np.array([[0, 1], [0, 0]]))
    with pytest.raises(HermiticityError):
        expect(raising, spin_basis("y", "+"))


def test_ket_validation():
    with pytest.raises(EmptySectorError):
        Ket(np.zeros(2)).normalized()
    with pytest.raises(LabError):
        inner(spin_basis("z", "+"), singlet())
    with pytest.raises(LabError):
        spin_operator("z", 3)


def test_ket_is_immutable():
    ket = spin_basis("z", "+")
    with pytest.raises(ValueError):
        ket.amplitudes[0] = 0.0


def test_singlet_survives_basis_swap():
    state = singlet()
    assert abs(inner(state, basis_swap(state))) == pytest.approx(1.0, abs=1e-12)


@given(amplitudes, amplitudes, amplitudes, amplitudes)
def test_tensor_norm_is_product_of_norms(a0, a1, b0, b1):
    a, b = Ket(np.array([a0, a1])), Ket(np.array([b0, b1]))
    assert tensor(a, b).norm == pytest.approx(a.norm * b.norm, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("hbar", [1.0, 2.0])
def test_total_spin_square_vanishes_on_singlet(hbar):
    S_y = total_spin("y", hbar=hbar)
    assert expect(S_y @ S_y, singlet()) == pytest.approx(0.0, abs=1e-12)


def test_tensor_overlap_of_rotated_pairs():
    v_pair = tensor(spin_basis("y", "-"), spin_basis("y", "+"))
    u_pair = tensor(spin_basis("z", "-"), spin_basis("z", "+"))
    assert abs(inner(v_pair, u_pair)) == pytest.approx(0.5, abs=1e-12)
