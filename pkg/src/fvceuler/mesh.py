"""Uniform 1D finite-volume grid, cell-average storage and the CFL rule.

Storage convention: a field keeps its conserved variables in one array of
shape ``(3, n_cells + 2 * n_ghost)``; rows are (rho, rho u, E). Interface
``k`` (``0 <= k <= n_cells``) sits at ``x_min + k * dx`` between interior cells
``k - 1`` and ``k``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field

import numpy as np

from .gas_dynamics import (
    DEFAULT_GAS,
    EulerDomainError,
    GasModel,
    PrimitiveState,
    to_conserved,
    to_primitive,
)


class CflError(EulerDomainError):
    """No admissible time step (no wave activity, or a characteristic
    foot left the interpolation stencil)."""


@dataclass(frozen=True)
class Mesh:
    x_min: float = 0.0
    x_max: float = 1.0
    n_cells: int = 200
    n_ghost: int = 2

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError("mesh needs at least one interior cell")
        if self.n_ghost < 2:
            raise ValueError("mesh needs at least two ghost layers per side")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def n_total(self) -> int:
        return self.n_cells + 2 * self.n_ghost

    @property
    def interior(self) -> slice:
        return slice(self.n_ghost, self.n_ghost + self.n_cells)

    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def all_centers(self) -> np.ndarray:
        """Cell centres including ghost cells."""
        return self.x_min + (np.arange(self.n_total) - self.n_ghost + 0.5) * self.dx

    def interfaces(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


@dataclass
class Field:
    mesh: Mesh
    q: np.ndarray
    t: float = 0.0
    step: int = 0
    # per-interface alpha of the last FVC step; None before the first one
    alpha: np.ndarray | None = None

    def copy(self) -> "Field":
        return Field(
            self.mesh,
            self.q.copy(),
            self.t,
            self.step,
            None if self.alpha is None else self.alpha.copy(),
        )

    @property
    def interior(self) -> np.ndarray:
        return self.q[:, self.mesh.interior]

    def primitive(self, gas: GasModel = DEFAULT_GAS, ghosts: bool = False) -> PrimitiveState:
        return to_primitive(self.q if ghosts else self.interior, gas)


class CflMode(enum.Enum):
    BASE = "base"
    ALPHA_WEIGHTED = "alpha"


@dataclass(frozen=True)
class CflRule:
    courant: float = 0.8
    mode: CflMode = CflMode.BASE

    def __post_init__(self):
        if not self.courant > 0.0:
            raise ValueError(f"Courant number must be positive, got {self.courant}")


def init_riemann(
    mesh: Mesh,
    left: PrimitiveState,
    right: PrimitiveState,
    x_split: float,
    gas: GasModel = DEFAULT_GAS,
) -> Field:
    if not mesh.x_min <= x_split <= mesh.x_max:
        raise ValueError(f"split position {x_split} outside [{mesh.x_min}, {mesh.x_max}]")
    wl = np.array(to_conserved(left, gas), dtype=float)
    wr = np.array(to_conserved(right, gas), dtype=float)
    x = mesh.centers()
    q = np.empty((3, mesh.n_total))
    q[:, mesh.interior] = np.where(x < x_split, wl[:, None], wr[:, None])
    fld = Field(mesh, q)
    apply_transmissive_bc(fld)
    return fld


def apply_transmissive_bc(fld: Field) -> Field:
    """Zero-order extrapolation into every ghost layer (in place)."""
    g = fld.mesh.n_ghost
    fld.q[:, :g] = fld.q[:, g : g + 1]
    fld.q[:, -g:] = fld.q[:, -g - 1 : -g]
    return fld


def spectral_radius(q: np.ndarray, gas: GasModel = DEFAULT_GAS) -> np.ndarray:
    """|u| + c per cell for a conserved array of shape (3, n)."""
    rho, u, p = to_primitive(q, gas)
    return np.abs(u) + np.sqrt(gas.gamma * p / rho)


def compute_dt(
    fld: Field,
    rule: CflRule,
    alpha_prev: np.ndarray | None = None,
    gas: GasModel = DEFAULT_GAS,
) -> float:
    """Time step from the CFL rule.

    In alpha-weighted mode each interface pairs its (lagged) alpha with the
    larger spectral radius of its two neighbours; ``alpha_prev=None`` means
    alpha = 1/2 everywhere.
    """
    g, n = fld.mesh.n_ghost, fld.mesh.n_cells
    if rule.mode is CflMode.BASE:
        lam = spectral_radius(fld.interior, gas)
        denom = lam.max()
    else:
        lam = spectral_radius(fld.q[:, g - 1 : g + n + 1], gas)
        lam_face = np.maximum(lam[:-1], lam[1:])
        a = 0.5 if alpha_prev is None else np.asarray(alpha_prev, dtype=float)
        denom = np.max(a * lam_face)
    if not denom > 0.0:
        raise CflError("maximum wave speed is zero; no admissible time step")
    return rule.courant * fld.mesh.dx / float(denom)


def l1_error(values: np.ndarray, reference: np.ndarray, dx: float) -> np.ndarray | float:
    """dx * sum |values - reference| along the last axis.

    Works per variable for arrays shaped (n_vars, n_cells).
    """
    values = np.asarray(values, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if values.shape != reference.shape:
        raise ValueError(f"shape mismatch: {values.shape} vs {reference.shape}")
    err = dx * np.sum(np.abs(values - reference), axis=-1)
    return err[()] if np.ndim(err) == 0 else err
