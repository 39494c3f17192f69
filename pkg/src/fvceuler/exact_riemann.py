"""Exact Riemann solver for the ideal-gas Euler equations.

Pressure-function Newton iteration for the star region followed by
self-similar sampling of the wave fan (shocks, rarefactions, contact, and
the vacuum-generating double rarefaction).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gas_dynamics import DEFAULT_GAS, EulerDomainError, GasModel, PrimitiveState
from .mesh import Mesh

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 100


class ConvergenceError(EulerDomainError):
    pass


@dataclass(frozen=True)
class StarState:
    p_star: float
    u_star: float
    rho_star_left: float
    rho_star_right: float
    left_wave: str  # "shock" | "rarefaction" | "vacuum"
    right_wave: str
    iterations: int = 0

    @property
    def vacuum(self) -> bool:
        return self.left_wave == "vacuum"


@dataclass(frozen=True)
class WaveFan:
    """Wave speeds, left to right. Shocks have head == tail."""

    left_kind: str
    left_head: float
    left_tail: float
    contact: float
    right_kind: str
    right_tail: float
    right_head: float

    def speeds(self) -> tuple[float, ...]:
        return (self.left_head, self.left_tail, self.contact, self.right_tail, self.right_head)


def _c(state: PrimitiveState, g: float) -> float:
    return float(np.sqrt(g * state.p / state.rho))


def pressure_function(p, state: PrimitiveState, gas: GasModel = DEFAULT_GAS):
    """f_K(p) and df_K/dp for one side K of the Riemann problem."""
    g = gas.gamma
    rho_k, _, p_k = (float(v) for v in state)
    c_k = np.sqrt(g * p_k / rho_k)
    if p > p_k:
        a_k = 2.0 / ((g + 1.0) * rho_k)
        b_k = (g - 1.0) / (g + 1.0) * p_k
        root = np.sqrt(a_k / (b_k + p))
        f = (p - p_k) * root
        df = root * (1.0 - 0.5 * (p - p_k) / (b_k + p))
    else:
        ratio = p / p_k
        f = 2.0 * c_k / (g - 1.0) * (ratio ** ((g - 1.0) / (2.0 * g)) - 1.0)
        df = ratio ** (-(g + 1.0) / (2.0 * g)) / (rho_k * c_k)
    return f, df


def star_pressure_residual(p, left: PrimitiveState, right: PrimitiveState, gas: GasModel = DEFAULT_GAS):
    fl, _ = pressure_function(p, left, gas)
    fr, _ = pressure_function(p, right, gas)
    return fl + fr + (right.u - left.u)


def _side_density(p_star: float, state: PrimitiveState, g: float) -> float:
    rho_k, _, p_k = (float(v) for v in state)
    if p_star > p_k:
        ratio = p_star / p_k
        gm = (g - 1.0) / (g + 1.0)
        return rho_k * (ratio + gm) / (gm * ratio + 1.0)
    return rho_k * (p_star / p_k) ** (1.0 / g)


def solve_star(left: PrimitiveState, right: PrimitiveState, gas: GasModel = DEFAULT_GAS) -> StarState:
    g = gas.gamma
    for side in (left, right):
        if not (side.rho > 0.0 and side.p > 0.0):
            raise EulerDomainError(f"Riemann data must have rho > 0 and p > 0, got {side}")
    cl, cr = _c(left, g), _c(right, g)
    du = right.u - left.u
    if 2.0 * (cl + cr) / (g - 1.0) <= du:
        return StarState(0.0, float("nan"), 0.0, 0.0, "vacuum", "vacuum")

    # two-rarefaction guess, floored
    z = (g - 1.0) / (2.0 * g)
    p = ((cl + cr - 0.5 * (g - 1.0) * du) / (cl / left.p**z + cr / right.p**z)) ** (1.0 / z)
    p_floor = 1e-8 * min(left.p, right.p)
    p = max(p, p_floor)

    # the residual is increasing in p, so a bracket guards the Newton steps
    lo, hi = 0.0, np.inf
    for it in range(1, NEWTON_MAX_ITER + 1):
        fl, dfl = pressure_function(p, left, gas)
        fr, dfr = pressure_function(p, right, gas)
        f = fl + fr + du
        if f > 0.0:
            hi = min(hi, p)
        elif f < 0.0:
            lo = max(lo, p)
        else:
            break
        p_new = p - f / (dfl + dfr)
        if not lo < p_new < hi:
            p_new = 0.5 * (lo + hi) if np.isfinite(hi) else 2.0 * p
        change = 2.0 * abs(p_new - p) / (p_new + p)
        p = p_new
        if change < NEWTON_TOL:
            break
    else:
        raise ConvergenceError(f"star pressure did not converge in {NEWTON_MAX_ITER} iterations")

    fl, _ = pressure_function(p, left, gas)
    fr, _ = pressure_function(p, right, gas)
    u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl)
    return StarState(
        p_star=p,
        u_star=u,
        rho_star_left=_side_density(p, left, g),
        rho_star_right=_side_density(p, right, g),
        left_wave="shock" if p > left.p else "rarefaction",
        right_wave="shock" if p > right.p else "rarefaction",
        iterations=it,
    )


def wave_fan(star: StarState, left: PrimitiveState, right: PrimitiveState, gas: GasModel = DEFAULT_GAS) -> WaveFan:
    g = gas.gamma
    cl, cr = _c(left, g), _c(right, g)
    if star.vacuum:
        sl_tail = left.u + 2.0 * cl / (g - 1.0)
        sr_tail = right.u - 2.0 * cr / (g - 1.0)
        return WaveFan("rarefaction", left.u - cl, sl_tail, 0.5 * (sl_tail + sr_tail),
                       "rarefaction", sr_tail, right.u + cr)
    ps, us = star.p_star, star.u_star
    if star.left_wave == "shock":
        s = left.u - cl * np.sqrt((g + 1.0) / (2.0 * g) * ps / left.p + (g - 1.0) / (2.0 * g))
        lh = lt = s
    else:
        lh = left.u - cl
        lt = us - cl * (ps / left.p) ** ((g - 1.0) / (2.0 * g))
    if star.right_wave == "shock":
        s = right.u + cr * np.sqrt((g + 1.0) / (2.0 * g) * ps / right.p + (g - 1.0) / (2.0 * g))
        rh = rt = s
    else:
        rh = right.u + cr
        rt = us + cr * (ps / right.p) ** ((g - 1.0) / (2.0 * g))
    return WaveFan(star.left_wave, float(lh), float(lt), float(us), star.right_wave, float(rt), float(rh))


def sample(star: StarState, left: PrimitiveState, right: PrimitiveState, xi, gas: GasModel = DEFAULT_GAS) -> PrimitiveState:
    """Exact solution at similarity coordinate(s) xi = x / t."""
    xi = np.asarray(xi, dtype=float)
    g = gas.gamma
    fan = wave_fan(star, left, right, gas)
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    def fill(mask, r, v, pr):
        rho[mask], u[mask], p[mask] = r, v, pr

    gm1, gp1 = g - 1.0, g + 1.0
    cl, cr = _c(left, g), _c(right, g)

    # left rarefaction interior: u + 2c/(g-1) constant
    def left_fan(x):
        c = 2.0 / gp1 * cl + gm1 / gp1 * (left.u - x)
        return left.rho * (c / cl) ** (2.0 / gm1), 2.0 / gp1 * (cl + 0.5 * gm1 * left.u + x), left.p * (c / cl) ** (2.0 * g / gm1)

    def right_fan(x):
        c = 2.0 / gp1 * cr - gm1 / gp1 * (right.u - x)
        return right.rho * (c / cr) ** (2.0 / gm1), 2.0 / gp1 * (-cr + 0.5 * gm1 * right.u + x), right.p * (c / cr) ** (2.0 * g / gm1)

    fill(xi <= fan.left_head, left.rho, left.u, left.p)
    fill(xi >= fan.right_head, right.rho, right.u, right.p)
    m = (xi > fan.left_head) & (xi < fan.left_tail)
    if np.any(m):
        fill(m, *left_fan(xi[m]))
    m = (xi > fan.right_tail) & (xi < fan.right_head)
    if np.any(m):
        fill(m, *right_fan(xi[m]))
    if star.vacuum:
        fill((xi >= fan.left_tail) & (xi <= fan.right_tail), 0.0, fan.contact, 0.0)
    else:
        fill((xi >= fan.left_tail) & (xi < fan.contact), star.rho_star_left, star.u_star, star.p_star)
        fill((xi >= fan.contact) & (xi <= fan.right_tail), star.rho_star_right, star.u_star, star.p_star)
    if xi.ndim == 0:
        return PrimitiveState(float(rho), float(u), float(p))
    return PrimitiveState(rho, u, p)


def exact_profile(
    left: PrimitiveState,
    right: PrimitiveState,
    x_split: float,
    t: float,
    mesh: Mesh,
    gas: GasModel = DEFAULT_GAS,
    x: np.ndarray | None = None,
) -> PrimitiveState:
    """Exact (rho, u, p) at the cell centres of ``mesh`` (or at ``x``) at time t."""
    if t < 0.0:
        raise ValueError("t must be non-negative")
    x = mesh.centers() if x is None else np.asarray(x, dtype=float)
    if t == 0.0:
        on_left = x < x_split
        return PrimitiveState(*(np.where(on_left, a, b).astype(float) for a, b in zip(left, right)))
    star = solve_star(left, right, gas)
    return sample(star, left, right, (x - x_split) / t, gas)
