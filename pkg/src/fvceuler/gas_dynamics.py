"""Ideal-gas thermodynamics and eigenstructure of the 1D Euler equations.

Every function accepts scalars or numpy arrays (componentwise), so the same
code serves single-state unit checks and whole-grid vectorised updates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# rho or p at or below this value counts as a positivity violation
POSITIVITY_TOL = 1e-12


class EulerDomainError(ValueError):
    """A thermodynamic quantity was requested outside its domain."""


class PositivityError(EulerDomainError):
    """Density or pressure became non-positive.

    ``cell`` is the (interior) cell or interface index of the first offending
    entry when known; ``step`` and ``time`` are filled in by time loops.
    """

    def __init__(self, message, cell=None, step=None, time=None, quantity=None):
        self.cell = cell
        self.step = step
        self.time = time
        self.quantity = quantity
        super().__init__(message)

    def with_context(self, step=None, time=None):
        if step is not None:
            self.step = step
        if time is not None:
            self.time = time
        parts = [self.args[0]]
        if self.step is not None:
            parts.append(f"step={self.step}")
        if self.time is not None:
            parts.append(f"t={self.time:.6g}")
        self.args = (", ".join(parts),)
        return self


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise EulerDomainError(f"gamma must exceed 1, got {self.gamma}")


class ConservedState(NamedTuple):
    rho: float | np.ndarray
    mom: float | np.ndarray
    ener: float | np.ndarray


class PrimitiveState(NamedTuple):
    rho: float | np.ndarray
    u: float | np.ndarray
    p: float | np.ndarray


DEFAULT_GAS = GasModel()


def internal_energy(prim: PrimitiveState, gas: GasModel = DEFAULT_GAS):
    rho = np.asarray(prim.rho, dtype=float)
    if np.any(rho <= 0.0):
        raise EulerDomainError("internal energy needs positive density")
    e = np.asarray(prim.p, dtype=float) / ((gas.gamma - 1.0) * rho)
    return e[()] if e.ndim == 0 else e


def to_conserved(prim: PrimitiveState, gas: GasModel = DEFAULT_GAS) -> ConservedState:
    rho, u, p = (np.asarray(v, dtype=float) for v in prim)
    _check_positive(rho, "density")
    _check_positive(p, "pressure")
    ener = 0.5 * rho * u * u + p / (gas.gamma - 1.0)
    return ConservedState(*(_unwrap(v) for v in (rho, rho * u, ener)))


def to_primitive(cons: ConservedState, gas: GasModel = DEFAULT_GAS) -> PrimitiveState:
    """Recover (rho, u, p); raises PositivityError naming the first bad cell."""
    rho, mom, ener = (np.asarray(v, dtype=float) for v in cons)
    _check_positive(rho, "density")
    u = mom / rho
    p = (gas.gamma - 1.0) * (ener - 0.5 * mom * u)
    _check_positive(p, "pressure")
    return PrimitiveState(_unwrap(rho), _unwrap(u), _unwrap(p))


def sound_speed(prim: PrimitiveState, gas: GasModel = DEFAULT_GAS):
    rho = np.asarray(prim.rho, dtype=float)
    p = np.asarray(prim.p, dtype=float)
    if np.any(rho <= 0.0) or np.any(p < 0.0):
        raise EulerDomainError("sound speed needs rho > 0 and p >= 0")
    return _unwrap(np.sqrt(gas.gamma * p / rho))


def mach_number(prim: PrimitiveState, gas: GasModel = DEFAULT_GAS):
    c = np.asarray(sound_speed(prim, gas))
    if np.any(c == 0.0):
        raise EulerDomainError("Mach number undefined where the sound speed vanishes")
    return _unwrap(np.asarray(prim.u, dtype=float) / c)


def physical_flux(cons: ConservedState, gas: GasModel = DEFAULT_GAS):
    """Euler flux (rho u, rho u^2 + p, u (E + p)); stacked along axis 0."""
    rho, mom, ener = (np.asarray(v, dtype=float) for v in cons)
    u = mom / rho
    p = (gas.gamma - 1.0) * (ener - 0.5 * mom * u)
    return np.stack([mom, mom * u + p, u * (ener + p)])


def eigenvalues(prim: PrimitiveState, gas: GasModel = DEFAULT_GAS):
    c = sound_speed(prim, gas)
    u = _unwrap(np.asarray(prim.u, dtype=float))
    return u - c, u, u + c


def riemann_invariants(prim: PrimitiveState, gas: GasModel = DEFAULT_GAS):
    """(u - 2c/(gamma-1), u + 2c/(gamma-1))."""
    c = sound_speed(prim, gas)
    u = _unwrap(np.asarray(prim.u, dtype=float))
    k = 2.0 / (gas.gamma - 1.0)
    return u - k * c, u + k * c


def total_enthalpy(cons: ConservedState, gas: GasModel = DEFAULT_GAS):
    rho, mom, ener = (np.asarray(v, dtype=float) for v in cons)
    p = (gas.gamma - 1.0) * (ener - 0.5 * mom * mom / rho)
    return _unwrap((ener + p) / rho)


def flux_jacobian(cons: ConservedState, gas: GasModel = DEFAULT_GAS) -> np.ndarray:
    """Standard ideal-gas flux Jacobian dF/dW for a single state."""
    g = gas.gamma
    rho, mom, ener = (float(v) for v in cons)
    u = mom / rho
    h = total_enthalpy(cons, gas)
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [0.5 * (g - 3.0) * u * u, (3.0 - g) * u, g - 1.0],
            [u * (0.5 * (g - 1.0) * u * u - h), h - (g - 1.0) * u * u, g * u],
        ]
    )


def right_eigenvectors(u, c, h):
    """Columns r1, r2, r3 for the (u-c, u, u+c) families.

    Works on arrays: the result has shape (3, 3, ...) with ``r[:, k]`` the
    k-th eigenvector.
    """
    one = np.ones_like(np.asarray(u, dtype=float))
    return np.array(
        [
            [one, one, one],
            [u - c, u, u + c],
            [h - u * c, 0.5 * u * u * one, h + u * c],
        ]
    )


def _check_positive(values: np.ndarray, name: str) -> None:
    bad = ~(values > POSITIVITY_TOL)
    if np.any(bad):
        idx = int(np.flatnonzero(np.atleast_1d(bad))[0])
        val = float(np.atleast_1d(values)[idx])
        where = f" at index {idx}" if values.ndim else ""
        raise PositivityError(
            f"non-positive {name} {val:.6g}{where}", cell=idx if values.ndim else None, quantity=name
        )


def _unwrap(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a
