import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fvceuler.gas_dynamics import (
    ConservedState,
    EulerDomainError,
    GasModel,
    PositivityError,
    PrimitiveState,
    eigenvalues,
    flux_jacobian,
    internal_energy,
    mach_number,
    physical_flux,
    riemann_invariants,
    right_eigenvectors,
    sound_speed,
    to_conserved,
    to_primitive,
    total_enthalpy,
)

densities = st.floats(1e-6, 1e6)
velocities = st.floats(-1e3, 1e3)
pressures = st.floats(1e-6, 1e6)
gammas = st.floats(1.05, 3.0)


@pytest.mark.parametrize("rho,p,expected", [(1.0, 1.0, 2.5), (0.125, 0.1, 2.0), (2.0, 0.0, 0.0)])
def test_internal_energy(rho, p, expected):
    assert internal_energy(PrimitiveState(rho, 0.0, p)) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(
    "prim,cons",
    [((1.0, 0.75, 1.0), (1.0, 0.75, 2.78125)), ((1.0, 0.0, 1.0), (1.0, 0.0, 2.5)), ((0.125, 0.0, 0.1), (0.125, 0.0, 0.25))],
)
def test_to_conserved_and_back(prim, cons):
    np.testing.assert_allclose(to_conserved(PrimitiveState(*prim)), cons, rtol=1e-15)
    np.testing.assert_allclose(to_primitive(ConservedState(*cons)), prim, rtol=1e-15, atol=1e-15)


def test_unit_energy_gives_pressure_gamma_minus_one():
    np.testing.assert_allclose(to_primitive(ConservedState(1.0, 0.0, 1.0)), (1.0, 0.0, 0.4), rtol=1e-15)


@pytest.mark.parametrize("cons,name", [((-1.0, 0.0, 1.0), "density"), ((1.0, 0.0, -1.0), "pressure"), ((1.0, 0.0, 1e-13), "pressure")])
def test_to_primitive_rejects_non_positive(cons, name):
    with pytest.raises(PositivityError, match=name):
        to_primitive(ConservedState(*cons))


def test_positivity_error_names_first_bad_cell():
    q = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [2.5, -1.0, 2.5]])
    with pytest.raises(PositivityError) as info:
        to_primitive(q)
    assert info.value.cell == 1


@pytest.mark.parametrize("rho,p,expected", [(1.0, 1.0, np.sqrt(1.4)), (1.4, 1.0, 1.0), (1.0, 0.0, 0.0)])
def test_sound_speed(rho, p, expected):
    assert sound_speed(PrimitiveState(rho, 0.0, p)) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("prim,expected", [((1.0, 0.0, 1.0), 0.0), ((1.4, 1.0, 1.0), 1.0), ((1.4, -0.5, 1.0), -0.5)])
def test_mach_number(prim, expected):
    assert mach_number(PrimitiveState(*prim)) == pytest.approx(expected, rel=1e-15, abs=1e-15)


def test_mach_number_undefined_without_sound():
    with pytest.raises(EulerDomainError):
        mach_number(PrimitiveState(1.0, 1.0, 0.0))


@pytest.mark.parametrize(
    "cons,expected",
    [
        ((1.0, 0.0, 2.5), (0.0, 1.0, 0.0)),
        ((1.0, 0.75, 2.78125), (0.75, 1.5625, 2.8359375)),
        ((0.125, 0.0, 0.25), (0.0, 0.1, 0.0)),
    ],
)
def test_physical_flux(cons, expected):
    np.testing.assert_allclose(physical_flux(ConservedState(*cons)), expected, rtol=1e-15, atol=1e-15)


@pytest.mark.parametrize(
    "prim,expected",
    [
        ((1.4, 0.0, 1.0), (-1.0, 0.0, 1.0)),
        ((1.4, 2.0, 1.0), (1.0, 2.0, 3.0)),
        ((1.0, 0.75, 1.0), (0.75 - np.sqrt(1.4), 0.75, 0.75 + np.sqrt(1.4))),
    ],
)
def test_eigenvalues(prim, expected):
    np.testing.assert_allclose(eigenvalues(PrimitiveState(*prim)), expected, rtol=1e-15, atol=1e-15)


@pytest.mark.parametrize(
    "prim,expected", [((1.4, 0.0, 1.0), (-5.0, 5.0)), ((1.4, 1.0, 1.0), (-4.0, 6.0)), ((1.0, 0.4, 0.0), (0.4, 0.4))]
)
def test_riemann_invariants(prim, expected):
    np.testing.assert_allclose(riemann_invariants(PrimitiveState(*prim)), expected, rtol=1e-14)


@pytest.mark.parametrize("cons,expected", [((1.0, 0.0, 2.5), 3.5), ((0.125, 0.0, 0.25), 2.8), ((1.0, 0.75, 2.78125), 3.78125)])
def test_total_enthalpy(cons, expected):
    assert total_enthalpy(ConservedState(*cons)) == pytest.approx(expected, rel=1e-15)


def test_gamma_must_exceed_one():
    with pytest.raises(EulerDomainError):
        GasModel(1.0)


@settings(max_examples=300, deadline=None)
@given(densities, st.floats(-10.0, 10.0), pressures, gammas)
def test_round_trip(rho, mach, p, gamma):
    # |Mach| <= 10 keeps E - rho u^2 / 2 free of catastrophic cancellation
    gas = GasModel(gamma)
    u = mach * np.sqrt(gamma * p / rho)
    back = to_primitive(to_conserved(PrimitiveState(rho, u, p), gas), gas)
    assert back.rho == pytest.approx(rho, rel=1e-13)
    assert back.u == pytest.approx(u, rel=1e-13)
    assert back.p == pytest.approx(p, rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(densities, velocities, pressures, gammas)
def test_flux_matches_direct_formula(rho, u, p, gamma):
    gas = GasModel(gamma)
    w = to_conserved(PrimitiveState(rho, u, p), gas)
    direct = [rho * u, rho * u * u + p, u * (w.ener + p)]
    np.testing.assert_allclose(physical_flux(w, gas), direct, rtol=1e-9, atol=1e-9 * (rho * u * u + p))


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(-50.0, 50.0), st.floats(1e-3, 1e3), gammas)
def test_flux_is_homogeneous_of_degree_one(rho, u, p, gamma):
    gas = GasModel(gamma)
    w = np.array(to_conserved(PrimitiveState(rho, u, p), gas))
    jw = flux_jacobian(w, gas) @ w
    f = physical_flux(w, gas)
    np.testing.assert_allclose(jw, f, rtol=1e-12, atol=1e-12 * np.abs(f).max())


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(-50.0, 50.0), st.floats(1e-3, 1e3), gammas)
def test_eigenpairs_of_jacobian(rho, u, p, gamma):
    gas = GasModel(gamma)
    prim = PrimitiveState(rho, u, p)
    w = to_conserved(prim, gas)
    lam = eigenvalues(prim, gas)
    assert lam[0] < lam[1] < lam[2]
    r = right_eigenvectors(u, sound_speed(prim, gas), total_enthalpy(w, gas))
    jac = flux_jacobian(w, gas)
    for k in range(3):
        residual = np.linalg.norm(jac @ r[:, k] - lam[k] * r[:, k])
        assert residual <= 1e-12 * np.linalg.norm(jac) * np.linalg.norm(r[:, k])


@settings(max_examples=100, deadline=None)
@given(densities, velocities, pressures, gammas)
def test_invariant_spread_is_positive(rho, u, p, gamma):
    gas = GasModel(gamma)
    prim = PrimitiveState(rho, u, p)
    lo, hi = riemann_invariants(prim, gas)
    assert hi - lo == pytest.approx(4.0 * sound_speed(prim, gas) / (gamma - 1.0), rel=1e-9)
    assert hi > lo
