"""Finite volume characteristics (FVC) scheme.

Each step has two stages:

* predictor: for every interface, trace the fluid-velocity characteristic
  back over ``alpha * dt`` to its foot, interpolate the conserved state
  there and add the advective source term integrated over the same span;
* corrector: conservative update with the physical flux evaluated at the
  predicted interface states.

``alpha`` blends a stability-dictated value with the second-order value 1/2
through a slope limiter driven by the Riemann invariants.

Array routines work on the full padded grid. Interface ``k`` runs from 0
(left boundary) to ``n_cells`` (right boundary); in padded indices its left
and right neighbours are cells ``g - 1 + k`` and ``g + k``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
import numpy as np

from .gas_dynamics import DEFAULT_GAS, GasModel, PositivityError, POSITIVITY_TOL, to_primitive
from .mesh import CflError, CflMode, CflRule, Field, apply_transmissive_bc, compute_dt

FOOT_TOL = 1e-12
FOOT_MAX_ITER = 10
# flat-data threshold of the smoothness ratio, relative to max(q)
FLAT_TOL = 1e-14
BIG_RATIO = 1e30
ALPHA_MIN = 1e-3


class LimiterKind(enum.Enum):
    MINMOD = "minmod"
    VANALBADA = "vanalbada"


@dataclass(frozen=True)
class AlphaMode:
    """``AlphaMode()`` is the adaptive blend; ``AlphaMode(0.5)`` pins alpha."""

    fixed: float | None = None

    def __post_init__(self):
        if self.fixed is not None and not 0.0 < self.fixed <= 1.0:
            raise ValueError(f"fixed alpha must lie in (0, 1], got {self.fixed}")

    @property
    def adaptive(self) -> bool:
        return self.fixed is None

    @classmethod
    def parse(cls, text: str) -> "AlphaMode":
        text = text.strip().lower()
        if text == "adaptive":
            return cls()
        if text.startswith("fixed:"):
            try:
                value = float(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad fixed alpha value in {text!r}") from None
            return cls(value)
        raise ValueError(f"alpha mode must be 'adaptive' or 'fixed:<value>', got {text!r}")

    def __str__(self):
        return "adaptive" if self.adaptive else f"fixed:{self.fixed:g}"


ADAPTIVE = AlphaMode()


class InterfaceStates:
    """Predicted interface states with their alpha and characteristic feet."""

    __slots__ = ("w", "alpha", "_foot_index", "_mesh", "_uw", "_pw")

    def __init__(self, w, alpha, foot_index, mesh, uw=None, pw=None):
        self.w = w  # (3, n_cells + 1) conserved interface states
        self.alpha = alpha  # (n_cells + 1,)
        self._foot_index = foot_index
        self._mesh = mesh
        self._uw = uw
        self._pw = pw

    @property
    def foot(self) -> np.ndarray:
        """Physical foot positions."""
        m = self._mesh
        return m.x_min + (self._foot_index - m.n_ghost + 0.5) * m.dx


def limiter(kind: LimiterKind, r):
    r = np.asarray(r, dtype=float)
    if kind is LimiterKind.MINMOD:
        phi = np.maximum(np.minimum(r, 1.0), 0.0)
    elif kind is LimiterKind.VANALBADA:
        # (r^2 + r)/(r^2 + 1) with r^2 overflow near BIG_RATIO handled by the limit 1
        with np.errstate(over="ignore", invalid="ignore"):
            phi = np.where(r > 0.0, (r * r + r) / (r * r + 1.0), 0.0)
        phi = np.where(np.isfinite(phi), phi, 1.0)
    else:
        raise ValueError(f"unknown limiter {kind!r}")
    return phi[()] if phi.ndim == 0 else phi


def _cells(q: np.ndarray, gas: GasModel):
    """(u, p, c, |u| + c) on a conserved array, with one positivity check."""
    rho = q[0]
    u = q[1] / rho
    p = (gas.gamma - 1.0) * (q[2] - 0.5 * q[1] * u)
    if not (rho.min() > POSITIVITY_TOL and p.min() > POSITIVITY_TOL):
        to_primitive(q, gas)  # raises with the offending index
    c = np.sqrt(gas.gamma * p / rho)
    return u, p, c, np.abs(u) + c


def invariant_magnitude(q: np.ndarray, gas: GasModel = DEFAULT_GAS) -> np.ndarray:
    """max(|u + 2c/(g-1)|, |u - 2c/(g-1)|) per cell."""
    _, _, c, lam = _cells(np.asarray(q, dtype=float), gas)
    return _invariant_magnitude(c, lam, gas)


def _invariant_magnitude(c, lam, gas):
    # c >= 0, so the larger magnitude is |u| + 2c/(g-1) = lam + (2/(g-1) - 1) c
    return lam + (2.0 / (gas.gamma - 1.0) - 1.0) * c


def ratio_from_triplets(q_left, q_mid, q_right, scale=None) -> np.ndarray:
    """(q_mid - q_left)/(q_right - q_mid) with the flat-data conventions:
    flat on both sides gives 1, flat only downstream gives +-BIG_RATIO."""
    q_left, q_mid, q_right = (np.asarray(a, dtype=float) for a in (q_left, q_mid, q_right))
    if scale is None:
        scale = max(np.max(np.abs(q_left)), np.max(np.abs(q_mid)), np.max(np.abs(q_right)))
    return _ratio(q_mid - q_left, q_right - q_mid, FLAT_TOL * scale)


def _ratio(num, den, tol):
    flat_den = np.abs(den) < tol
    if not flat_den.any():
        return num / den
    # flat downstream: +-BIG_RATIO, or 1 when the upstream side is flat too
    flat_value = np.where(np.abs(num) < tol, 1.0, np.copysign(BIG_RATIO, num))
    return np.where(flat_den, flat_value, num / np.where(flat_den, 1.0, den))


def _interface_ratios(qi: np.ndarray, g: int, n: int) -> np.ndarray:
    dq = qi[g - 1 : g + n + 1] - qi[g - 2 : g + n]
    return _ratio(dq[:-1], dq[1:], FLAT_TOL * qi.max())


def smoothness_ratios(fld: Field, gas: GasModel = DEFAULT_GAS) -> np.ndarray:
    """Smoothness ratio at every interface (cells i-1, i, i+1 around i+1/2)."""
    _, _, c, lam = _cells(fld.q, gas)
    return _interface_ratios(_invariant_magnitude(c, lam, gas), fld.mesh.n_ghost, fld.mesh.n_cells)


def smoothness_ratio(fld: Field, k: int, gas: GasModel = DEFAULT_GAS) -> float:
    return float(smoothness_ratios(fld, gas)[k])


def blend_alpha(alpha_bar, phi):
    """alpha_bar + (1/2 - alpha_bar) * phi, clamped into (0, 1]."""
    a = alpha_bar + (0.5 - alpha_bar) * np.asarray(phi, dtype=float)
    a = np.maximum(np.minimum(a, 1.0), ALPHA_MIN)
    return a[()] if np.ndim(a) == 0 else a


def _alphas(c, lam, dx, dt, mode, kind, gas, g, n):
    if not mode.adaptive:
        return np.full(n + 1, mode.fixed)
    s = np.maximum(lam[g - 1 : g + n], lam[g : g + n + 1])
    phi = limiter(kind, _interface_ratios(_invariant_magnitude(c, lam, gas), g, n))
    with np.errstate(divide="ignore"):
        alpha_bar = dx / (2.0 * dt * s)
    return blend_alpha(alpha_bar, phi)


def alphas(
    fld: Field,
    dt: float,
    mode: AlphaMode = ADAPTIVE,
    kind: LimiterKind = LimiterKind.MINMOD,
    gas: GasModel = DEFAULT_GAS,
) -> np.ndarray:
    """Control parameter at every interface.

    A vanishing local Rusanov speed gives alpha_bar = inf, which the clamp
    maps to 1.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    _, _, c, lam = _cells(fld.q, gas)
    m = fld.mesh
    return _alphas(c, lam, m.dx, dt, mode, kind, gas, m.n_ghost, m.n_cells)


def alpha(
    fld: Field,
    k: int,
    dt: float,
    mode: AlphaMode = ADAPTIVE,
    kind: LimiterKind = LimiterKind.MINMOD,
    gas: GasModel = DEFAULT_GAS,
) -> float:
    return float(alphas(fld, dt, mode, kind, gas)[k])


def _lerp(values: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolation on integer nodes; values may be (m,) or (3, m)."""
    m = values.shape[-1]
    i0 = np.clip(np.floor(s).astype(np.intp), 0, m - 2)
    w = s - i0
    lo = values[..., i0]
    return lo + w * (values[..., i0 + 1] - lo)


def _solve_feet(u: np.ndarray, shift: np.ndarray, g: int, n: int):
    """Fixed point of s = s_face - shift * u~(s) on the piecewise-linear
    velocity, solved exactly segment by segment.

    Works in padded index units (cell centres at integers, interface k at
    g - 1/2 + k). Only the three segments spanning cells i-1 .. i+2 are
    searched, own segment first. Returns (segment start, offset in [0, 1]);
    the segment array is None when every foot stays in its own segment.
    """
    u_lo = u[g - 1 : g + n]
    slope = 1.0 + shift * (u[g : g + n + 1] - u_lo)
    t = (0.5 - shift * u_lo) / slope
    own = (t >= 0.0) & (t <= 1.0) & (slope > 0.0)
    if own.all():
        return None, t
    j = np.arange(g - 1, g + n)
    best_seg = np.where(own, j, -1)
    best_t = np.where(own, t, 0.0)
    for offset, anchor in ((-1, 1.5), (1, -0.5)):
        seg = j + offset
        slope = 1.0 + shift * (u[seg + 1] - u[seg])
        t = (anchor - shift * u[seg]) / slope
        ok = (best_seg < 0) & (t >= 0.0) & (t <= 1.0) & (slope > 0.0)
        best_seg = np.where(ok, seg, best_seg)
        best_t = np.where(ok, t, best_t)
    if np.any(best_seg < 0):
        k = int(np.flatnonzero(best_seg < 0)[0])
        raise CflError(f"characteristic foot of interface {k} left the stencil")
    return best_seg, best_t


def _foot_index(seg, t, g, n):
    if seg is None:
        return np.arange(g - 1, g + n) + t
    return seg + t


def trace_feet(fld: Field, alpha_k, dt: float, gas: GasModel = DEFAULT_GAS) -> np.ndarray:
    """Physical foot positions of every interface."""
    m = fld.mesh
    u = fld.q[1] / fld.q[0]
    shift = np.broadcast_to(np.asarray(alpha_k, dtype=float) * dt / m.dx, (m.n_cells + 1,))
    seg, t = _solve_feet(u, shift, m.n_ghost, m.n_cells)
    return _index_to_x(fld, _foot_index(seg, t, m.n_ghost, m.n_cells))


def trace_feet_fixed_point(fld: Field, alpha_k, dt: float, max_iter: int = FOOT_MAX_ITER, tol: float = FOOT_TOL):
    """Plain fixed-point iteration x <- x_face - alpha*dt*u~(x), per interface.

    Stops once every increment is below ``tol * dx`` or after ``max_iter``
    sweeps; kept as a cross-check for :func:`trace_feet`.
    """
    m = fld.mesh
    u = fld.q[1] / fld.q[0]
    s_face = m.n_ghost - 0.5 + np.arange(m.n_cells + 1)
    shift = np.asarray(alpha_k, dtype=float) * dt / m.dx
    s = s_face.copy()
    for _ in range(max_iter):
        s_new = s_face - shift * _lerp(u, s)
        done = np.all(np.abs(s_new - s) < tol)
        s = s_new
        if done:
            break
    if np.any(np.abs(s - s_face) > 1.5):
        k = int(np.flatnonzero(np.abs(s - s_face) > 1.5)[0])
        raise CflError(f"characteristic foot of interface {k} left the stencil")
    return _index_to_x(fld, s)


def trace_foot(fld: Field, k: int, alpha_k: float, dt: float) -> float:
    """Foot position of interface ``k``."""
    return float(trace_feet(fld, alpha_k, dt)[k])


def _index_to_x(fld: Field, s):
    m = fld.mesh
    return m.x_min + (s - m.n_ghost + 0.5) * m.dx


def _x_to_index(fld: Field, x):
    m = fld.mesh
    return (np.asarray(x, dtype=float) - m.x_min) / m.dx + m.n_ghost - 0.5


def interpolate_at_foot(fld: Field, x_c) -> np.ndarray:
    """Conserved state at position(s) ``x_c`` by linear interpolation between
    the two bracketing cell centres."""
    s = _x_to_index(fld, x_c)
    if np.any(s < 0.0) or np.any(s > fld.q.shape[1] - 1):
        raise CflError(f"position {x_c} outside the cell-centre span")
    return _lerp(fld.q, s)


def predictor(
    fld: Field,
    dt: float,
    mode: AlphaMode = ADAPTIVE,
    kind: LimiterKind = LimiterKind.MINMOD,
    gas: GasModel = DEFAULT_GAS,
    cells=None,
) -> InterfaceStates:
    """Interface states at every interface; ghost cells must be filled.

    ``cells`` optionally passes precomputed (u, p, c, |u| + c) for the
    padded grid.
    """
    m = fld.mesh
    g, n, dx = m.n_ghost, m.n_cells, m.dx
    q = fld.q
    u, p, c, lam = _cells(q, gas) if cells is None else cells
    a = _alphas(c, lam, dx, dt, mode, kind, gas, g, n)

    coef = a * (dt / dx)
    seg, t = _solve_feet(u, coef, g, n)
    if seg is None:
        lo = q[:, g - 1 : g + n]
        w_hat = lo + t * (q[:, g : g + n + 1] - lo)
    else:
        lo = q[:, seg]
        w_hat = lo + t * (q[:, seg + 1] - lo)

    # W = W_hat + alpha dt G with G = -(rho du, rho u du + dp, E du + d(pu)) / dx,
    # derivatives from the two cells adjacent to the interface
    pu = p[g - 1 : g + n + 1] * u[g - 1 : g + n + 1]
    w = w_hat * (1.0 - coef * (u[g : g + n + 1] - u[g - 1 : g + n]))
    w[1] -= coef * (p[g : g + n + 1] - p[g - 1 : g + n])
    w[2] -= coef * (pu[1:] - pu[:-1])

    rho_w = w[0]
    u_w = w[1] / rho_w
    p_w = (gas.gamma - 1.0) * (w[2] - 0.5 * w[1] * u_w)
    if not (rho_w.min() > POSITIVITY_TOL and p_w.min() > POSITIVITY_TOL):
        try:
            to_primitive(w, gas)
        except PositivityError as exc:
            raise PositivityError(
                f"interface state: {exc}", cell=exc.cell, quantity=exc.quantity
            ) from None
    return InterfaceStates(w, a, _foot_index(seg, t, g, n), m, u_w, p_w)


def interface_flux(w: np.ndarray, gas: GasModel = DEFAULT_GAS, u=None, p=None) -> np.ndarray:
    """Physical flux at interface states (``u``, ``p`` if already known)."""
    if u is None:
        u = w[1] / w[0]
        p = (gas.gamma - 1.0) * (w[2] - 0.5 * w[1] * u)
    return np.stack([w[1], w[1] * u + p, u * (w[2] + p)])


def corrector(fld: Field, states: InterfaceStates | np.ndarray, dt: float, gas: GasModel = DEFAULT_GAS) -> Field:
    """Conservative update with fluxes F(W_k) at the n_cells + 1 interfaces."""
    if isinstance(states, InterfaceStates):
        flux = interface_flux(states.w, gas, states._uw, states._pw)
    else:
        flux = interface_flux(np.asarray(states, dtype=float), gas)
    return conservative_update(fld, flux, dt, gas)


def conservative_update(fld: Field, flux: np.ndarray, dt: float, gas: GasModel = DEFAULT_GAS) -> Field:
    """W_i -= dt/dx (F_{i+1/2} - F_{i-1/2}); returns a new field at t + dt
    with ghosts refilled."""
    out = Field(fld.mesh, fld.q.copy(), fld.t, fld.step, fld.alpha)
    sl = fld.mesh.interior
    out.q[:, sl] -= (dt / fld.mesh.dx) * (flux[:, 1:] - flux[:, :-1])
    out.t = fld.t + dt
    out.step = fld.step + 1
    qi = out.q[:, sl]
    p = (gas.gamma - 1.0) * (qi[2] - 0.5 * qi[1] * qi[1] / qi[0])
    if not (qi[0].min() > POSITIVITY_TOL and p.min() > POSITIVITY_TOL):
        try:
            to_primitive(qi, gas)
        except PositivityError as exc:
            raise exc.with_context(step=out.step, time=out.t) from None
    apply_transmissive_bc(out)
    return out


def fvc_step(
    fld: Field,
    courant: float = 0.8,
    mode: AlphaMode = ADAPTIVE,
    kind: LimiterKind = LimiterKind.MINMOD,
    gas: GasModel = DEFAULT_GAS,
    t_end: float | None = None,
    cfl_mode: CflMode = CflMode.BASE,
) -> Field:
    """One FVC step: bc, dt, predictor, corrector.

    With ``cfl_mode=ALPHA_WEIGHTED`` the time step uses the alpha values of
    the previous step (1/2 on the first). The step is clipped so that t
    never passes ``t_end``.
    """
    apply_transmissive_bc(fld)
    m = fld.mesh
    g, n = m.n_ghost, m.n_cells
    cells = _cells(fld.q, gas)
    if cfl_mode is CflMode.BASE:
        lam_max = float(cells[3][g : g + n].max())
        if not lam_max > 0.0:
            raise CflError("maximum wave speed is zero; no admissible time step")
        dt = courant * m.dx / lam_max
    else:
        alpha_prev = fld.alpha
        if alpha_prev is None and not mode.adaptive:
            alpha_prev = np.full(n + 1, mode.fixed)
        dt = compute_dt(fld, CflRule(courant, CflMode.ALPHA_WEIGHTED), alpha_prev, gas)
    if t_end is not None:
        dt = min(dt, t_end - fld.t)
    states = predictor(fld, dt, mode, kind, gas, cells)
    out = corrector(fld, states, dt, gas)
    if t_end is not None and out.t > t_end - 1e-14 * max(1.0, abs(t_end)):
        out.t = t_end
    out.alpha = states.alpha
    return out
