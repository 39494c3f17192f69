"""Reference Godunov-type fluxes: Rusanov, HLL and Roe with Harten's fix.

Flux functions take left/right conserved arrays of shape (3, ...) and return
the numerical flux with the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gas_dynamics import DEFAULT_GAS, POSITIVITY_TOL, EulerDomainError, GasModel, to_primitive
from .mesh import CflMode, CflRule, Field, apply_transmissive_bc, compute_dt
from .fvc import conservative_update


class RoeAverageError(EulerDomainError):
    """Roe-averaged sound speed squared is not positive."""


@dataclass(frozen=True)
class NumericalFlux:
    """``kind`` is one of 'rusanov', 'hll', 'roe'; ``epsilon`` scales the
    Harten threshold (delta = epsilon * c_roe) and is ignored otherwise."""

    kind: str = "rusanov"
    epsilon: float = 0.1

    def __post_init__(self):
        if self.kind not in FLUXES:
            raise ValueError(f"unknown flux {self.kind!r}; expected one of {sorted(FLUXES)}")
        if self.epsilon < 0.0:
            raise ValueError("entropy-fix parameter must be non-negative")

    def __call__(self, wl, wr, gas: GasModel = DEFAULT_GAS):
        if self.kind == "roe":
            return roe_harten_flux(wl, wr, gas, self.epsilon)
        return FLUXES[self.kind](wl, wr, gas)


def _side(w: np.ndarray, gas: GasModel):
    """(rho, u, p, c, F(w)) for one side of the interfaces."""
    rho = w[0]
    u = w[1] / rho
    p = (gas.gamma - 1.0) * (w[2] - 0.5 * w[1] * u)
    if not (np.min(rho) > POSITIVITY_TOL and np.min(p) > POSITIVITY_TOL):
        to_primitive(w, gas)  # raises with the offending index
    c = np.sqrt(gas.gamma * p / rho)
    flux = np.stack([w[1], w[1] * u + p, u * (w[2] + p)])
    return rho, u, p, c, flux


def rusanov_flux(wl, wr, gas: GasModel = DEFAULT_GAS):
    wl = np.asarray(wl, dtype=float)
    wr = np.asarray(wr, dtype=float)
    _, ul, _, cl, fl = _side(wl, gas)
    _, ur, _, cr, fr = _side(wr, gas)
    s = np.maximum(np.abs(ul) + cl, np.abs(ur) + cr)
    return 0.5 * (fl + fr - s * (wr - wl))


def hll_flux(wl, wr, gas: GasModel = DEFAULT_GAS):
    """HLL with Davis wave-speed estimates."""
    wl = np.asarray(wl, dtype=float)
    wr = np.asarray(wr, dtype=float)
    _, ul, _, cl, fl = _side(wl, gas)
    _, ur, _, cr, fr = _side(wr, gas)
    sl = np.minimum(ul - cl, ur - cr)
    sr = np.maximum(ul + cl, ur + cr)
    degenerate = sr <= sl
    if np.any(degenerate):
        with np.errstate(divide="ignore", invalid="ignore"):
            middle = _hll_branches(wl, wr, fl, fr, sl, sr)
        return np.where(degenerate, rusanov_flux(wl, wr, gas), middle)
    return _hll_branches(wl, wr, fl, fr, sl, sr)


def _hll_branches(wl, wr, fl, fr, sl, sr):
    # clamping the speeds folds the supersonic branches into the same formula:
    # sl >= 0 gives fl, sr <= 0 gives fr
    sl0 = np.minimum(sl, 0.0)
    sr0 = np.maximum(sr, 0.0)
    return (sr0 * fl - sl0 * fr + sl0 * sr0 * (wr - wl)) / (sr0 - sl0)


def roe_harten_flux(wl, wr, gas: GasModel = DEFAULT_GAS, eps: float = 0.1):
    """Roe flux; acoustic eigenvalues below delta = eps * c_roe are replaced
    by (lambda^2 + delta^2) / (2 delta). eps = 0 disables the fix."""
    g = gas.gamma
    wl = np.asarray(wl, dtype=float)
    wr = np.asarray(wr, dtype=float)
    rl, ul, pl, _, fl = _side(wl, gas)
    rr, ur, pr, _, fr = _side(wr, gas)
    hl = (wl[2] + pl) / rl
    hr = (wr[2] + pr) / rr

    sl, sr = np.sqrt(rl), np.sqrt(rr)
    u = (sl * ul + sr * ur) / (sl + sr)
    h = (sl * hl + sr * hr) / (sl + sr)
    c2 = (g - 1.0) * (h - 0.5 * u * u)
    if np.any(c2 <= 0.0):
        k = int(np.flatnonzero(np.atleast_1d(c2 <= 0.0))[0])
        raise RoeAverageError(f"Roe-averaged sound speed squared is non-positive at interface {k}")
    c = np.sqrt(c2)
    rho = sl * sr

    drho = rr - rl
    du = ur - ul
    dp = pr - pl
    # wave strengths for (u-c, u, u+c)
    a1 = (dp - rho * c * du) / (2.0 * c2)
    a2 = drho - dp / c2
    a3 = (dp + rho * c * du) / (2.0 * c2)

    lam1 = np.abs(u - c)
    lam2 = np.abs(u)
    lam3 = np.abs(u + c)
    if eps > 0.0:
        delta = eps * c
        lam1 = np.where(lam1 < delta, (lam1 * lam1 + delta * delta) / (2.0 * delta), lam1)
        lam3 = np.where(lam3 < delta, (lam3 * lam3 + delta * delta) / (2.0 * delta), lam3)

    k1 = lam1 * a1
    k2 = lam2 * a2
    k3 = lam3 * a3
    uc = u * c
    diss = np.stack(
        [
            k1 + k2 + k3,
            k1 * (u - c) + k2 * u + k3 * (u + c),
            k1 * (h - uc) + k2 * (0.5 * u * u) + k3 * (h + uc),
        ]
    )
    return 0.5 * (fl + fr - diss)


FLUXES = {"rusanov": rusanov_flux, "hll": hll_flux, "roe": roe_harten_flux}


def godunov_type_step(
    fld: Field,
    flux: NumericalFlux,
    rule: CflRule = CflRule(0.8),
    gas: GasModel = DEFAULT_GAS,
    t_end: float | None = None,
) -> Field:
    """bc, base-mode dt, interface fluxes, conservative update."""
    apply_transmissive_bc(fld)
    dt = compute_dt(fld, CflRule(rule.courant, CflMode.BASE), None, gas)
    if t_end is not None:
        dt = min(dt, t_end - fld.t)
    g, n = fld.mesh.n_ghost, fld.mesh.n_cells
    wl = fld.q[:, g - 1 : g + n]
    wr = fld.q[:, g : g + n + 1]
    out = conservative_update(fld, flux(wl, wr, gas), dt, gas)
    if t_end is not None and out.t > t_end - 1e-14 * max(1.0, abs(t_end)):
        out.t = t_end
    return out
