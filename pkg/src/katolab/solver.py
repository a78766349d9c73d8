"""Incompressible channel-flow solver with a per-step energy ledger.

Scheme: explicit two-step Adams-Bashforth advection in an energy-conserving
(skew-symmetric) staggered form, Crank-Nicolson diffusion solved per
streamwise Fourier mode with tridiagonal wall-normal sweeps, and an
incremental pressure projection whose Poisson solve is diagonal in x and
tridiagonal in y. Advection with arithmetic-mean face values and
area-weighted mass fluxes conserves discrete kinetic energy exactly on the
stretched grid, so the ledger isolates time-integration error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import (ChannelGrid, FlowField, center_velocity, dissipation_rate,
                     divergence)

INITIAL_CONDITIONS = ("poiseuille", "perturbed_shear_layer",
                      "wall_bounded_vortex_array")


class SolverError(RuntimeError):
    """Configuration or runtime solver failure."""


@dataclass
class SolverConfig:
    nu: float
    nx: int
    ny: int
    lx: float = 2.0 * np.pi
    stretch: float = 2.0
    cfl: float = 0.35
    dt_max: float = 1.5e-3
    t_end: float = 1.0
    snapshot_interval: float = 0.02
    initial_condition: str = "perturbed_shear_layer"
    ic_params: dict = field(default_factory=dict)
    advection: str = "skew"          # "skew" | "none" (Stokes dynamics)
    seed: int = 0

    def validate(self) -> None:
        if not (0.0 < self.nu < 1.0):
            raise SolverError(f"nu={self.nu} outside (0, 1)")
        if self.cfl > 0.5 or self.cfl <= 0:
            raise SolverError(f"cfl={self.cfl} outside (0, 0.5]")
        if self.t_end < 0:
            raise SolverError(f"t_end={self.t_end} negative")
        if self.advection not in ("skew", "none"):
            raise SolverError(f"unknown advection form {self.advection!r}")
        if self.initial_condition not in INITIAL_CONDITIONS:
            raise SolverError(
                f"unknown initial condition id {self.initial_condition!r}; "
                f"expected one of {INITIAL_CONDITIONS}")

    def make_grid(self) -> ChannelGrid:
        return ChannelGrid(self.nx, self.ny, self.lx, self.stretch)


@dataclass
class Trajectory:
    """Snapshots at scheduled times plus the per-step energy ledger."""

    grid: ChannelGrid
    nu: float
    config: SolverConfig
    times: list
    snapshots: list
    ledger: dict                      # arrays: t, E, rate, step_diss, cum_diss, max_div, dt
    aborted: bool = False
    abort_reason: str | None = None

    @property
    def t_final(self) -> float:
        return self.times[-1]

    def energy_tolerance(self, k: int) -> float:
        return 1e-8 * self.ledger["E"][0] * max(k, 1)

    def energy_inequality_violation(self) -> float:
        """Worst positive excess of E(t_k) + cumulative dissipation over the budget."""
        led = self.ledger
        excess = led["E"] + led["cum_diss"] - led["E"][0]
        budget = 1e-8 * led["E"][0] * np.maximum(np.arange(len(excess)), 1)
        return float(np.max(excess - budget))

    def ledger_defect(self) -> float:
        """E(0) - E(T) - cumulative dissipation (time-integration residual)."""
        led = self.ledger
        return float(led["E"][0] - led["E"][-1] - led["cum_diss"][-1])


def kinetic_energy(state: FlowField) -> float:
    """0.5 * integral of |u|^2 in the staggered volume-weighted inner product."""
    g = state.grid
    eu = np.sum(state.u ** 2 * (g.dx * g.dyc))
    ev = np.sum(state.v ** 2 * (g.dx * g.dyv))
    return 0.5 * float(eu + ev)


# ---------------------------------------------------------------------------
# Spatial operators
# ---------------------------------------------------------------------------

def advection_terms(state: FlowField):
    """div(u x u) on u and v points, energy-conserving staggered form.

    Mass fluxes through shifted control-volume faces use area-weighted
    staggered velocities; advected face values are plain arithmetic means.
    """
    g = state.grid
    u, v = state.u, state.v

    # u momentum
    ue = 0.5 * (u + np.roll(u, -1, axis=0))           # at cell centers
    flux_x = (g.dyc * ue) * ue
    adv_u = (flux_x - np.roll(flux_x, 1, axis=0))
    f_corner = g.dx * 0.5 * (v + np.roll(v, 1, axis=0))   # mass flux at (xf, yf)
    uval = np.zeros_like(v)
    uval[:, 1:-1] = 0.5 * (u[:, :-1] + u[:, 1:])
    flux_y = f_corner * uval
    adv_u = (adv_u + flux_y[:, 1:] - flux_y[:, :-1]) / (g.dx * g.dyc)

    # v momentum (interior rows only)
    g_corner = 0.5 * (g.dyc[:-1] * u[:, :-1] + g.dyc[1:] * u[:, 1:])  # at (xf, yf_j)
    vval = 0.5 * (np.roll(v[:, 1:-1], 1, axis=0) + v[:, 1:-1])
    gval = g_corner * vval
    adv_vx = np.roll(gval, -1, axis=0) - gval
    m = 0.5 * (v[:, :-1] + v[:, 1:])
    m2 = g.dx * m * m
    adv_vy = m2[:, 1:] - m2[:, :-1]
    adv_v = np.zeros_like(v)
    adv_v[:, 1:-1] = (adv_vx + adv_vy) / (g.dx * g.dyv[1:-1])
    return adv_u, adv_v


def laplacian_terms(state: FlowField):
    """Discrete Laplacian of u and v (flux form in y, centered in x)."""
    g = state.grid
    u, v = state.u, state.v
    lap_u = (np.roll(u, -1, axis=0) - 2 * u + np.roll(u, 1, axis=0)) / g.dx ** 2
    flux = np.zeros((g.nx, g.ny + 1))
    flux[:, 1:-1] = (u[:, 1:] - u[:, :-1]) / g.h_uy
    flux[:, 0] = u[:, 0] / (g.yc[0] + 1.0)            # one-sided to wall zero
    flux[:, -1] = -u[:, -1] / (1.0 - g.yc[-1])
    lap_u = lap_u + (flux[:, 1:] - flux[:, :-1]) / g.dyc

    lap_v = np.zeros_like(v)
    vi = v[:, 1:-1]
    lap_v[:, 1:-1] = (np.roll(vi, -1, axis=0) - 2 * vi + np.roll(vi, 1, axis=0)) / g.dx ** 2
    dflux = (v[:, 1:] - v[:, :-1]) / g.dyc            # at cell centers
    lap_v[:, 1:-1] += (dflux[:, 1:] - dflux[:, :-1]) / g.dyv[1:-1]
    return lap_u, lap_v


def pressure_gradient(p: np.ndarray, grid: ChannelGrid):
    gx = (p - np.roll(p, 1, axis=0)) / grid.dx
    gy = np.zeros((grid.nx, grid.ny + 1))
    gy[:, 1:-1] = (p[:, 1:] - p[:, :-1]) / grid.dyv[1:-1]
    return gx, gy


# ---------------------------------------------------------------------------
# Tridiagonal mode solves
# ---------------------------------------------------------------------------

class _TridiagFactor:
    """Precomputed Thomas factorization for per-mode tridiagonal systems."""

    def __init__(self, lower, diag, upper):
        # lower[j] multiplies x[j-1]; upper[j] multiplies x[j+1]; shapes (modes, n)
        n = diag.shape[-1]
        self.lower = lower
        cp = np.zeros_like(diag)
        inv = np.zeros_like(diag)
        inv[:, 0] = 1.0 / diag[:, 0]
        cp[:, 0] = upper[:, 0] * inv[:, 0]
        for j in range(1, n):
            denom = diag[:, j] - lower[:, j] * cp[:, j - 1]
            inv[:, j] = 1.0 / denom
            if j < n - 1:
                cp[:, j] = upper[:, j] * inv[:, j]
        self.cp = cp
        self.inv = inv
        self.n = n

    def solve(self, rhs):
        n = self.n
        x = np.empty_like(rhs)
        x[:, 0] = rhs[:, 0] * self.inv[:, 0]
        for j in range(1, n):
            x[:, j] = (rhs[:, j] - self.lower[:, j] * x[:, j - 1]) * self.inv[:, j]
        for j in range(n - 2, -1, -1):
            x[:, j] -= self.cp[:, j] * x[:, j + 1]
        return x


class _Workspace:
    """Grid- and dt-dependent operators reused across steps."""

    def __init__(self, grid: ChannelGrid, nu: float, dt: float):
        self.grid = grid
        self.nu = nu
        self.dt = dt
        nx, ny = grid.nx, grid.ny
        modes = nx // 2 + 1
        theta_k = 2.0 * np.pi * np.arange(modes) / nx
        self.lam = (2.0 - 2.0 * np.cos(theta_k)) / grid.dx ** 2   # (modes,)

        # u diffusion rows j = 0..ny-1 with one-sided wall closures
        c_hi = np.zeros(ny)
        c_lo = np.zeros(ny)
        c_hi[:-1] = 1.0 / (grid.dyc[:-1] * grid.h_uy)
        c_hi[-1] = 1.0 / (grid.dyc[-1] * (1.0 - grid.yc[-1]))
        c_lo[1:] = 1.0 / (grid.dyc[1:] * grid.h_uy)
        c_lo[0] = 1.0 / (grid.dyc[0] * (grid.yc[0] + 1.0))
        s = 0.5 * nu * dt
        diag = 1.0 + s * self.lam[:, None] + s * (c_hi + c_lo)[None, :]
        lower = np.broadcast_to(-s * c_lo, (modes, ny)).copy()
        upper = np.broadcast_to(-s * c_hi, (modes, ny)).copy()
        lower[:, 0] = 0.0
        upper[:, -1] = 0.0
        self.cn_u = _TridiagFactor(lower.astype(complex), diag.astype(complex),
                                   upper.astype(complex))

        # v diffusion rows j = 1..ny-1 with Dirichlet walls
        nv = ny - 1
        c_hi_v = 1.0 / (grid.dyv[1:-1] * grid.dyc[1:])
        c_lo_v = 1.0 / (grid.dyv[1:-1] * grid.dyc[:-1])
        diag = 1.0 + s * self.lam[:, None] + s * (c_hi_v + c_lo_v)[None, :]
        lower = np.broadcast_to(-s * c_lo_v, (modes, nv)).copy()
        upper = np.broadcast_to(-s * c_hi_v, (modes, nv)).copy()
        lower[:, 0] = 0.0
        upper[:, -1] = 0.0
        self.cn_v = _TridiagFactor(lower.astype(complex), diag.astype(complex),
                                   upper.astype(complex))

        # Poisson rows j = 0..ny-1, Neumann walls, k = 0 pinned at the wall row
        c_hi_p = np.zeros(ny)
        c_lo_p = np.zeros(ny)
        c_hi_p[:-1] = 1.0 / (grid.dyc[:-1] * grid.dyv[1:-1])
        c_lo_p[1:] = 1.0 / (grid.dyc[1:] * grid.dyv[1:-1])
        diag = self.lam[:, None] + (c_hi_p + c_lo_p)[None, :]
        lower = np.broadcast_to(-c_lo_p, (modes, ny)).copy()
        upper = np.broadcast_to(-c_hi_p, (modes, ny)).copy()
        lower[:, 0] = 0.0
        upper[:, -1] = 0.0
        diag = diag.astype(complex)
        lower = lower.astype(complex)
        upper = upper.astype(complex)
        diag[0, 0] = 1.0   # pin the k=0 null mode at the wall row
        upper[0, 0] = 0.0
        self.poisson = _TridiagFactor(lower, diag, upper)

    def solve_cn_u(self, rhs_phys):
        rhs = np.ascontiguousarray(np.fft.rfft(rhs_phys, axis=0))   # (modes, ny)
        return np.fft.irfft(self.cn_u.solve(rhs), n=self.grid.nx, axis=0)

    def solve_cn_v(self, rhs_phys_interior):
        rhs = np.ascontiguousarray(np.fft.rfft(rhs_phys_interior, axis=0))
        return np.fft.irfft(self.cn_v.solve(rhs), n=self.grid.nx, axis=0)

    def solve_poisson(self, rhs_phys):
        """Solve (Dxx + Dyy) phi = rhs with Neumann walls; zero-mean pin."""
        rhs = -np.ascontiguousarray(np.fft.rfft(rhs_phys, axis=0))
        rhs[0, 0] = 0.0
        sol = self.poisson.solve(rhs)
        return np.fft.irfft(sol, n=self.grid.nx, axis=0)


def project(state: FlowField, ws: _Workspace, dt: float) -> np.ndarray:
    """Make the field divergence-free; returns the pressure increment phi."""
    g = state.grid
    div = divergence(state)
    phi = ws.solve_poisson(div / dt)
    gx, gy = pressure_gradient(phi, g)
    state.u -= dt * gx
    state.v -= dt * gy
    return phi


# ---------------------------------------------------------------------------
# Initial conditions
# ---------------------------------------------------------------------------

def _curl_of_streamfunction(grid: ChannelGrid, psi_corner: np.ndarray):
    """Exactly divergence-free staggered velocity from corner values of psi."""
    u = (psi_corner[:, 1:] - psi_corner[:, :-1]) / grid.dyc
    v = -(np.roll(psi_corner, -1, axis=0) - psi_corner) / grid.dx
    return u, v


def init_state(config: SolverConfig, grid: ChannelGrid | None = None) -> FlowField:
    """Build the initial field for a run; divergence-free and no-slip compatible."""
    config.validate()
    g = grid if grid is not None else config.make_grid()
    params = dict(config.ic_params)
    name = config.initial_condition

    if name == "poiseuille":
        u = np.broadcast_to(1.0 - g.yc ** 2, (g.nx, g.ny)).copy()
        v = np.zeros((g.nx, g.ny + 1))
    elif name == "perturbed_shear_layer":
        delta = params.get("thickness", 0.15)
        y0 = params.get("center", 0.0)
        amp = params.get("amplitude", 0.05)
        m = params.get("modes", 2)
        if delta < 2.0 * float(np.max(g.dyc)):
            raise SolverError(
                f"grid too coarse for shear thickness {delta}: "
                f"max cell height {float(np.max(g.dyc)):.4g}")
        u = np.broadcast_to(
            np.tanh((g.yc - y0) / delta) * (1.0 - g.yc ** 2), (g.nx, g.ny)).copy()
        v = np.zeros((g.nx, g.ny + 1))
        if amp != 0.0:
            psi = amp * np.sin(2 * np.pi * m * g.xf / g.lx)[:, None] \
                * (1.0 - g.yf ** 2)[None, :] ** 2
            du, dv = _curl_of_streamfunction(g, psi)
            u += du
            v += dv
    else:  # wall_bounded_vortex_array
        amp = params.get("amplitude", 0.4)
        m = params.get("modes", 2)
        psi = amp * np.sin(2 * np.pi * m * g.xf / g.lx)[:, None] \
            * (1.0 - g.yf ** 2)[None, :] ** 2
        u, v = _curl_of_streamfunction(g, psi)

    state = FlowField(g, u, np.asarray(v), np.zeros((g.nx, g.ny)), 0.0)
    ws = _Workspace(g, config.nu, 1.0)
    project(state, ws, 1.0)
    state.p = init_pressure(state, config.nu, ws)
    return state


def init_pressure(state: FlowField, nu: float, ws: _Workspace | None = None) -> np.ndarray:
    """Diagnostic pressure from the discrete pressure Poisson equation."""
    g = state.grid
    if ws is None:
        ws = _Workspace(g, nu, 1.0)
    adv_u, adv_v = advection_terms(state)
    lap_u, lap_v = laplacian_terms(state)
    force = FlowField(g, -adv_u + nu * lap_u, -adv_v + nu * lap_v,
                      np.zeros((g.nx, g.ny)), state.t)
    p = ws.solve_poisson(-divergence(force))
    return p - float(np.mean(p))


# ---------------------------------------------------------------------------
# Time stepping
# ---------------------------------------------------------------------------

class Stepper:
    """Holds factored operators and the previous advection term."""

    def __init__(self, config: SolverConfig, grid: ChannelGrid, dt: float):
        self.config = config
        self.grid = grid
        self.dt = dt
        self.nu = config.nu
        self.ws = _Workspace(grid, config.nu, dt)
        self.prev_adv = None

    def step(self, state: FlowField) -> FlowField:
        if self.config.advection != "skew":
            zero_u = np.zeros_like(state.u)
            zero_v = np.zeros_like(state.v)
            return self._advance(state, zero_u, zero_v)

        adv_u, adv_v = advection_terms(state)
        if self.prev_adv is None:
            # Heun bootstrap: predictor with Euler advection, corrector with
            # the trapezoid mean, keeping the first step's energy error O(dt^3).
            pred = self._advance(state, -adv_u, -adv_v)
            pu, pv = advection_terms(pred)
            eu = -0.5 * (adv_u + pu)
            ev = -0.5 * (adv_v + pv)
        else:
            pu, pv = self.prev_adv
            eu = -(1.5 * adv_u - 0.5 * pu)
            ev = -(1.5 * adv_v - 0.5 * pv)
        self.prev_adv = (adv_u, adv_v)
        return self._advance(state, eu, ev)

    def _advance(self, state: FlowField, eu, ev) -> FlowField:
        g = self.grid
        dt, nu = self.dt, self.nu
        lap_u, lap_v = laplacian_terms(state)
        gx, gy = pressure_gradient(state.p, g)
        rhs_u = state.u + dt * (eu - gx) + 0.5 * nu * dt * lap_u
        rhs_v = state.v[:, 1:-1] + dt * (ev - gy)[:, 1:-1] \
            + 0.5 * nu * dt * lap_v[:, 1:-1]

        new = FlowField(g, self.ws.solve_cn_u(rhs_u),
                        np.zeros_like(state.v), state.p.copy(), state.t + dt)
        new.v[:, 1:-1] = self.ws.solve_cn_v(rhs_v)

        phi = project(new, self.ws, dt)
        new.p = new.p + phi
        new.p -= float(np.mean(new.p))

        if not np.isfinite(new.u).all() or not np.isfinite(new.v).all():
            raise SolverError(f"solution diverged (NaN/Inf) at t={new.t:.6g}")
        return new


def step(state: FlowField, config: SolverConfig, dt: float | None = None,
         stepper: Stepper | None = None) -> FlowField:
    """Advance one time step; convenience wrapper building a fresh stepper."""
    if stepper is None:
        if dt is None:
            dt = choose_dt(state, config)
        stepper = Stepper(config, state.grid, dt)
    return stepper.step(state)


def choose_dt(state: FlowField, config: SolverConfig) -> float:
    """Advective CFL limit capped by the accuracy bound dt_max."""
    g = state.grid
    umax = float(np.max(np.abs(state.u))) + 1e-12
    vmax_over_dy = float(np.max(np.abs(state.v[:, 1:-1]) / g.dyv[1:-1])) + 1e-12
    dt_cfl = config.cfl / (umax / g.dx + vmax_over_dy)
    return min(config.dt_max, dt_cfl)


def run(config: SolverConfig, grid: ChannelGrid | None = None,
        state0: FlowField | None = None) -> Trajectory:
    """Execute a full run; snapshots on the schedule, ledger every step."""
    config.validate()
    g = grid if grid is not None else config.make_grid()
    state = state0.copy() if state0 is not None else init_state(config, g)
    nu = config.nu

    snap_dt = config.snapshot_interval
    if config.t_end == 0.0:
        led = _ledger_init(state, nu)
        return Trajectory(g, nu, config, [state.t], [state.copy()],
                          _ledger_finish(led))

    dt0 = choose_dt(state, config)
    steps_per_snap = max(1, int(np.ceil(snap_dt / dt0 - 1e-12)))
    dt = snap_dt / steps_per_snap
    n_snaps = int(round(config.t_end / snap_dt))
    if abs(n_snaps * snap_dt - config.t_end) > 1e-9:
        raise SolverError(
            f"t_end={config.t_end} is not a multiple of snapshot_interval={snap_dt}")

    stepper = Stepper(config, g, dt)
    led = _ledger_init(state, nu)
    t0 = state.t
    times = [t0]
    snapshots = [state.copy()]
    aborted = False
    reason = None
    try:
        for s in range(n_snaps):
            for _ in range(steps_per_snap):
                prev_rate = led["rate"][-1]
                state = stepper.step(state)
                _ledger_push(led, state, nu, dt, prev_rate)
            state.t = t0 + (s + 1) * snap_dt  # exact schedule times
            times.append(state.t)
            snapshots.append(state.copy())
    except SolverError as err:
        aborted = True
        reason = str(err)

    traj = Trajectory(g, nu, config, times, snapshots, _ledger_finish(led),
                      aborted=aborted, abort_reason=reason)
    return traj


def _ledger_init(state: FlowField, nu: float) -> dict:
    return {
        "t": [state.t],
        "E": [kinetic_energy(state)],
        "rate": [dissipation_rate(state)],
        "step_diss": [0.0],
        "cum_diss": [0.0],
        "max_div": [float(np.max(np.abs(divergence(state))))],
        "dt": [0.0],
    }


def _ledger_push(led: dict, state: FlowField, nu: float, dt: float,
                 prev_rate: float) -> None:
    rate = dissipation_rate(state)
    sd = nu * dt * 0.5 * (prev_rate + rate)
    led["t"].append(state.t)
    led["E"].append(kinetic_energy(state))
    led["rate"].append(rate)
    led["step_diss"].append(sd)
    led["cum_diss"].append(led["cum_diss"][-1] + sd)
    led["max_div"].append(float(np.max(np.abs(divergence(state)))))
    led["dt"].append(dt)


def _ledger_finish(led: dict) -> dict:
    return {k: np.asarray(v) for k, v in led.items()}
