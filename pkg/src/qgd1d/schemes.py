"""Explicit two-level steppers for the regularized barotropic system.

Both schemes advance (rho, rho*u) with three-point symmetric fluxes built on
the half mesh.  The standard discretization differences the pressure directly;
the "enthalpy" discretization replaces pressure differences by
(s rho)*diff(h(rho)) and a matching relaxation term, which makes it weakly
conservative in energy.  Dropping every term built from d/dx(rho*u) gives the
simplified (QHD) variant of either scheme, with w = w_hat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveDensity
from .gas import GasModel
from .mesh import GridOperators, MeshState
from .regularization import SchemeConfig, SchemeKind, Variant, regularization_params


@dataclass(frozen=True)
class HalfMeshFluxes:
    """Regularized fluxes on the half mesh (length n+1 arrays).

    j is the mass flux, w and w_hat the regularizing velocities, pi the
    regularized stress and pi_ns its viscous part mu*diff(u).  Under the
    simplified variant w equals w_hat exactly.
    """

    j: np.ndarray
    w: np.ndarray
    w_hat: np.ndarray
    pi: np.ndarray
    pi_ns: np.ndarray


def _shared_half_terms(state: MeshState, model: GasModel, cfg: SchemeConfig):
    g = GridOperators(state.mesh)
    rho, u = state.rho, state.u
    srho = g.avg(rho)
    su = g.avg(u)
    du = g.diff(u)
    tau, _ = regularization_params(model, cfg, rho, state.mesh.h)
    stau = g.avg(tau)
    _, pp_half = model.pressure(srho)
    mu_half = cfg.alpha_s * stau * srho * pp_half
    return g, srho, su, du, stau, pp_half, mu_half


def fluxes_standard(state: MeshState, model: GasModel, cfg: SchemeConfig) -> HalfMeshFluxes:
    """Half-mesh fluxes of the standard discretization.

        (s rho) w_hat = (s tau) [ (s rho)(s u) diff(u) + diff(p(rho)) ]
        (s rho) w     = (s tau) [ diff(rho u) ] (s u) + (s rho) w_hat
        j             = (s rho)(s u) - (s rho) w
        pi            = mu diff(u) + (s u)(s rho) w_hat + (s tau) p'(s rho) diff(rho u)

    The simplified variant drops the two diff(rho u) terms.
    """
    g, srho, su, du, stau, pp_half, mu_half = _shared_half_terms(state, model, cfg)
    rho, u = state.rho, state.u
    dp = g.diff(model.pressure(rho)[0])
    srho_what = stau * (srho * su * du + dp)
    w_hat = srho_what / srho
    pi_ns = mu_half * du
    pi = pi_ns + su * srho_what
    if cfg.regularization is Variant.FULL_QGD:
        drhou = g.diff(rho * u)
        srho_w = stau * drhou * su + srho_what
        w = srho_w / srho
        pi = pi + stau * pp_half * drhou
    else:
        srho_w = srho_what
        w = w_hat
    j = srho * su - srho_w
    return HalfMeshFluxes(j=j, w=w, w_hat=w_hat, pi=pi, pi_ns=pi_ns)


def fluxes_enthalpy(state: MeshState, model: GasModel, cfg: SchemeConfig) -> HalfMeshFluxes:
    """Half-mesh fluxes of the enthalpy discretization.

        w_hat     = (s tau) [ (s u) diff(u) + diff(h(rho)) ]
        (s rho) w = T (s u) + (s rho) w_hat,   T = s(tau/h'(rho)) { diff(h(rho)) (s u) + p'(s rho) diff(u) }
        j         = (s rho)(s u) - (s rho) w
        pi        = mu diff(u) + (s u)(s rho) w_hat + p'(s rho) T

    T discretizes tau * d/dx(rho u); the simplified variant sets it to zero.
    """
    g, srho, su, du, stau, pp_half, mu_half = _shared_half_terms(state, model, cfg)
    rho = state.rho
    h_nodal, hp_nodal = model.enthalpy(rho)
    dh = g.diff(h_nodal)
    w_hat = stau * (su * du + dh)
    srho_what = srho * w_hat
    pi_ns = mu_half * du
    pi = pi_ns + su * srho_what
    if cfg.regularization is Variant.FULL_QGD:
        tau, _ = regularization_params(model, cfg, rho, state.mesh.h)
        t_half = g.avg(tau / hp_nodal) * (dh * su + pp_half * du)
        w = w_hat + t_half * su / srho
        pi = pi + pp_half * t_half
        j = srho * su - (t_half * su + srho_what)
    else:
        w = w_hat
        j = srho * su - srho_what
    return HalfMeshFluxes(j=j, w=w, w_hat=w_hat, pi=pi, pi_ns=pi_ns)


def _advance(state: MeshState, rho_new: np.ndarray, m_new: np.ndarray, dt: float) -> MeshState:
    if not np.all(rho_new > 0.0):
        raise NonPositiveDensity(f"density became non-positive at t={state.t + dt}")
    return MeshState(state.mesh, rho_new, m_new / rho_new, state.t + dt)


def step_standard(state: MeshState, model: GasModel, cfg: SchemeConfig,
                  dt: float | None = None) -> MeshState:
    """One step of the standard scheme:

        rho+    = rho - dt * node_diff(j)
        (rho u)+ = rho u - dt * node_diff(j (s u) + p(s rho) - pi)
    """
    if dt is None:
        dt = cfg.time_step(state.mesh.h)
    g = GridOperators(state.mesh)
    f = fluxes_standard(state, model, cfg)
    srho = g.avg(state.rho)
    su = g.avg(state.u)
    p_half = model.pressure(srho)[0]
    rho_new = state.rho - dt * g.node_diff(f.j)
    m_new = state.momentum - dt * g.node_diff(f.j * su + p_half - f.pi)
    return _advance(state, rho_new, m_new, dt)


def step_enthalpy(state: MeshState, model: GasModel, cfg: SchemeConfig,
                  dt: float | None = None) -> MeshState:
    """One step of the enthalpy scheme:

        rho+    = rho - dt * node_diff(j)
        (rho u)+ = rho u - dt * [ node_diff(j (s u) - pi) + node_avg((s rho) diff(h(rho))) ]
    """
    if dt is None:
        dt = cfg.time_step(state.mesh.h)
    g = GridOperators(state.mesh)
    f = fluxes_enthalpy(state, model, cfg)
    srho = g.avg(state.rho)
    su = g.avg(state.u)
    dh = g.diff(model.enthalpy(state.rho)[0])
    rho_new = state.rho - dt * g.node_diff(f.j)
    m_new = state.momentum - dt * (g.node_diff(f.j * su - f.pi) + g.node_avg(srho * dh))
    return _advance(state, rho_new, m_new, dt)


_STEPPERS = {SchemeKind.STANDARD: step_standard, SchemeKind.ENTHALPY: step_enthalpy}


def make_stepper(cfg: SchemeConfig):
    return _STEPPERS[cfg.scheme]


@dataclass
class Diagnostics:
    """Per-step scalar records, initial state included (length = steps + 1)."""

    t: np.ndarray
    mass: np.ndarray
    momentum: np.ndarray
    min_rho: np.ndarray
    max_abs_u: np.ndarray


@dataclass
class Trajectory:
    """Snapshots plus per-step diagnostics of one simulation run."""

    snapshots: list[tuple[float, MeshState]]
    diagnostics: Diagnostics
    completed: bool
    overflow: bool
    steps: int
    note: str = ""


def _diag_row(state: MeshState):
    h = state.mesh.h
    return (
        state.t,
        h * float(np.sum(state.rho)),
        h * float(np.sum(state.momentum)),
        float(np.min(state.rho)),
        float(np.max(np.abs(state.u))),
    )


def run_simulation(initial: MeshState, model: GasModel, cfg: SchemeConfig,
                   t_end: float, record_every: int = 1) -> Trajectory:
    """Advance the configured stepper to t_end, recording diagnostics.

    Diagnostics are taken every step, snapshots every record_every steps
    (plus the initial and final states).  A non-finite value or loss of
    density positivity ends the run early with the overflow flag set
    instead of raising, so parameter sweeps can classify failures.
    """
    if t_end <= 0.0:
        raise ValueError("t_end must be > 0")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    cfg = cfg.resolve_c_ref(model, initial.rho)
    dt = cfg.time_step(initial.mesh.h)
    stepper = make_stepper(cfg)

    state = initial
    rows = [_diag_row(state)]
    snapshots = [(state.t, state)]
    steps = 0
    overflow = False
    note = ""
    eps = 1e-12 * max(1.0, abs(t_end))
    while state.t < t_end - eps:
        step_dt = min(dt, t_end - state.t)
        try:
            new_state = stepper(state, model, cfg, dt=step_dt)
        except NonPositiveDensity as exc:
            overflow = True
            note = str(exc)
            break
        if not (np.all(np.isfinite(new_state.rho)) and np.all(np.isfinite(new_state.u))):
            overflow = True
            note = f"non-finite value at t={new_state.t}"
            break
        state = new_state
        steps += 1
        rows.append(_diag_row(state))
        if steps % record_every == 0:
            snapshots.append((state.t, state))
    if not overflow and snapshots[-1][0] < state.t:
        snapshots.append((state.t, state))

    cols = list(zip(*rows))
    diag = Diagnostics(*(np.asarray(c, dtype=float) for c in cols))
    return Trajectory(
        snapshots=snapshots,
        diagnostics=diag,
        completed=not overflow,
        overflow=overflow,
        steps=steps,
        note=note,
    )
