"""Planar 3-DOF rigid-body simulation of the three-fin robotic fish.

Body-frame dynamics with axis-specific added mass, quadratic drag and
constant fin thrusts (each fin is either on or off; activation passes
through a first-order spin-up lag):

    (m + ma_u) du/dt = sum(Fx) + (m + ma_v) v r - 0.5 rho CdA_u |u| u
    (m + ma_v) dv/dt = sum(Fy) - (m + ma_u) u r - 0.5 rho CdA_v |v| v
    (Iz + Ia)  dr/dt = sum(M)  - C_dr |r| r - C_duu u^2 r

with kinematics dx/dt = u cos(th) - v sin(th), dy/dt = u sin(th) + v cos(th),
dth/dt = r.  The C_duu u^2 r term is a forward-speed cross-flow yaw
damping (weathervane effect); it defaults to zero and is enabled by the
shipped calibration, which needs it to reproduce the measured drop in yaw
rate when the caudal fin assists a pectoral turn.

Integration is fixed-step classic RK4.  A simulation run is deterministic:
the state sequence depends only on the scenario, the body, and the
tick-stamped fin commands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import IntegrationError, ValidationError

__all__ = [
    "FinMount",
    "FishBody",
    "SimState",
    "Obstacle",
    "ScheduleEntry",
    "Scenario",
    "CollisionEvent",
    "Trajectory",
    "TrajectorySummary",
    "standard_fins",
    "step",
    "ScenarioRunner",
    "simulate",
    "replay_commands",
    "check_collision",
    "summarize",
    "solve_steady",
    "kinetic_energy",
    "trajectory_to_csv",
    "trajectory_from_csv",
]

FIN_ROLES = ("left_pectoral", "right_pectoral", "caudal")
PECTORAL_ANGLE = math.pi / 6.0

# fish body approximated as a disc of this fraction of BL for contact checks
FISH_RADIUS_FRACTION = 0.35

MAX_STEP_DT = 5.0e-3


@dataclass(frozen=True)
class FinMount:
    """One fin: role, body-frame position (m), thrust direction (rad, body
    frame) and thrust magnitude (N) when active."""

    role: str
    position: tuple[float, float]
    thrust_direction: float
    thrust_magnitude: float

    def __post_init__(self):
        if self.role not in FIN_ROLES:
            raise ValidationError(f"unknown fin role {self.role!r}")
        if self.role == "caudal":
            if self.thrust_direction != 0.0:
                raise ValidationError("caudal thrust_direction must be 0 (along +x)")
        else:
            if abs(abs(self.thrust_direction) - PECTORAL_ANGLE) > 1e-12:
                raise ValidationError("pectoral thrust_direction must be +/- pi/6")
        if self.thrust_magnitude < 0:
            raise ValidationError("thrust_magnitude must be >= 0")


@dataclass(frozen=True)
class FishBody:
    """Rigid-body, added-mass and drag parameters plus the three fin mounts.

    Drag areas are Cd*A products (m^2); yaw_drag is the quadratic yaw drag
    coefficient (N m s^2); yaw_drag_crossflow couples yaw damping to the
    forward speed squared (N m s^3 / m^2) and defaults to 0.
    """

    fins: tuple[FinMount, ...]
    mass: float = 0.088
    body_length: float = 0.085
    added_mass_surge: float = 0.0176
    added_mass_sway: float = 0.0704
    yaw_inertia: float = 4.51e-5
    added_yaw_inertia: float = 4.51e-5
    drag_area_surge: float = 1.1e-3
    drag_area_sway: float = 5.7e-3
    yaw_drag: float = 2.0e-5
    yaw_drag_crossflow: float = 0.0
    fluid_density: float = 1000.0

    def __post_init__(self):
        if self.mass <= 0 or self.body_length <= 0:
            raise ValidationError("mass and body_length must be > 0")
        for name in (
            "added_mass_surge",
            "added_mass_sway",
            "yaw_inertia",
            "added_yaw_inertia",
            "drag_area_surge",
            "drag_area_sway",
            "yaw_drag",
            "yaw_drag_crossflow",
        ):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.fluid_density <= 0:
            raise ValidationError("fluid_density must be > 0")
        roles = tuple(f.role for f in self.fins)
        if sorted(roles) != sorted(FIN_ROLES):
            raise ValidationError(f"fins must have exactly the roles {FIN_ROLES}")
        for fin in self.fins:
            if math.hypot(*fin.position) > self.body_length:
                raise ValidationError(f"{fin.role} position farther than one body length")

    def fin(self, role: str) -> FinMount:
        for f in self.fins:
            if f.role == role:
                return f
        raise ValidationError(f"no fin with role {role!r}")


def standard_fins(thrust_left: float, thrust_right: float, thrust_caudal: float,
                  body_length: float = 0.085,
                  pectoral_x: float = -0.1, pectoral_y: float = 0.25,
                  caudal_x: float = -0.5, caudal_y: float = 0.0) -> tuple[FinMount, ...]:
    """Build the three fin mounts at the standard layout.

    Positions are given as fractions of body length.  The left pectoral
    pushes forward-starboard (direction -pi/6) so that activating it turns
    the fish right; the right pectoral mirrors it.
    """
    bl = body_length
    return (
        FinMount("left_pectoral", (pectoral_x * bl, +pectoral_y * bl),
                 -PECTORAL_ANGLE, thrust_left),
        FinMount("right_pectoral", (pectoral_x * bl, -pectoral_y * bl),
                 +PECTORAL_ANGLE, thrust_right),
        FinMount("caudal", (caudal_x * bl, caudal_y * bl), 0.0, thrust_caudal),
    )


@dataclass(frozen=True)
class SimState:
    """World-frame pose and body-frame velocities at time t.

    theta is the unwrapped heading (not reduced modulo 2*pi) so yaw metrics
    can integrate across full turns.
    """

    t: float
    x: float
    y: float
    theta: float
    u: float
    v: float
    r: float

    def __post_init__(self):
        for name in ("t", "x", "y", "theta", "u", "v", "r"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"SimState.{name} must be finite")


REST = SimState(t=0.0, x=0.0, y=0.0, theta=0.0, u=0.0, v=0.0, r=0.0)


@dataclass(frozen=True)
class Obstacle:
    x: float
    y: float
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValidationError("obstacle radius must be > 0")


@dataclass(frozen=True)
class ScheduleEntry:
    """Fin activation triple (left, right, caudal) over [t_start, t_end)."""

    t_start: float
    t_end: float
    fins: tuple[bool, bool, bool]

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValidationError("schedule entry needs t_start < t_end")


@dataclass(frozen=True)
class Scenario:
    """A simulation setup: duration, step size, fin schedule and obstacles."""

    duration: float
    dt: float = 1.0e-3
    schedule: tuple[ScheduleEntry, ...] = ()
    obstacles: tuple[Obstacle, ...] = ()
    initial: SimState = REST
    name: str = ""

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("dt must be > 0")
        if self.duration < 0:
            raise ValidationError("duration must be >= 0")
        for entry in self.schedule:
            if entry.t_start < 0 or entry.t_end > self.duration + 1e-12:
                raise ValidationError("schedule entries must lie within [0, duration]")
        for i in range(3):
            intervals = sorted(
                (e.t_start, e.t_end) for e in self.schedule if e.fins[i]
            )
            for (s0, e0), (s1, e1) in zip(intervals, intervals[1:]):
                if s1 < e0:
                    raise ValidationError(
                        f"overlapping activation intervals for fin {FIN_ROLES[i]}"
                    )

    def fins_at(self, t: float) -> tuple[bool, bool, bool]:
        active = [False, False, False]
        for entry in self.schedule:
            if entry.t_start <= t < entry.t_end:
                for i in range(3):
                    active[i] = active[i] or entry.fins[i]
        return tuple(active)


@dataclass(frozen=True)
class CollisionEvent:
    t: float
    obstacle_index: int
    contact_point: tuple[float, float]


@dataclass
class Trajectory:
    """Sampled simulation output: states, commanded fins per sample, events."""

    states: list[SimState]
    fins: list[tuple[bool, bool, bool]]
    events: list[CollisionEvent] = field(default_factory=list)


def _fin_tables(body: FishBody):
    """Per-fin body-frame force components and moment at unit activation."""
    table = []
    for role in FIN_ROLES:
        fin = body.fin(role)
        fx = fin.thrust_magnitude * math.cos(fin.thrust_direction)
        fy = fin.thrust_magnitude * math.sin(fin.thrust_direction)
        mz = fin.position[0] * fy - fin.position[1] * fx
        table.append((fx, fy, mz))
    return table


def _derivatives(y, levels, body: FishBody, tables):
    """Time derivative of (x, y, theta, u, v, r) at fin activation levels."""
    x, yy, theta, u, v, r = y
    fx = fy = mz = 0.0
    for (tfx, tfy, tmz), level in zip(tables, levels):
        fx += tfx * level
        fy += tfy * level
        mz += tmz * level
    m_u = body.mass + body.added_mass_surge
    m_v = body.mass + body.added_mass_sway
    i_z = body.yaw_inertia + body.added_yaw_inertia
    rho = body.fluid_density
    du = (fx + m_v * v * r - 0.5 * rho * body.drag_area_surge * abs(u) * u) / m_u
    dv = (fy - m_u * u * r - 0.5 * rho * body.drag_area_sway * abs(v) * v) / m_v
    dr = (mz - body.yaw_drag * abs(r) * r - body.yaw_drag_crossflow * u * u * r) / i_z
    ct, st = math.cos(theta), math.sin(theta)
    return (
        u * ct - v * st,
        u * st + v * ct,
        r,
        du,
        dv,
        dr,
    )


def _rk4(y, levels, body, tables, dt):
    k1 = _derivatives(y, levels, body, tables)
    y2 = tuple(y[i] + 0.5 * dt * k1[i] for i in range(6))
    k2 = _derivatives(y2, levels, body, tables)
    y3 = tuple(y[i] + 0.5 * dt * k2[i] for i in range(6))
    k3 = _derivatives(y3, levels, body, tables)
    y4 = tuple(y[i] + dt * k3[i] for i in range(6))
    k4 = _derivatives(y4, levels, body, tables)
    return tuple(
        y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(6)
    )


_STATE_NAMES = ("x", "y", "theta", "u", "v", "r")


def _check_finite(y, t):
    for name, value in zip(_STATE_NAMES, y):
        if not math.isfinite(value):
            raise IntegrationError(
                f"state component {name} became non-finite at t = {t:.6f} s",
                t=t, component=name,
            )


def step(state: SimState, body: FishBody, active: tuple[bool, bool, bool],
         dt: float) -> SimState:
    """One RK4 step with the given fins on at full thrust (no spin-up lag)."""
    if not 0.0 < dt <= MAX_STEP_DT:
        raise ValidationError(f"dt must be in (0, {MAX_STEP_DT}] s")
    tables = _fin_tables(body)
    levels = tuple(1.0 if a else 0.0 for a in active)
    y = (state.x, state.y, state.theta, state.u, state.v, state.r)
    y_new = _rk4(y, levels, body, tables, dt)
    t_new = state.t + dt
    _check_finite(y_new, t_new)
    return SimState(t_new, *y_new)


def check_collision(state: SimState, body: FishBody,
                    obstacles: tuple[Obstacle, ...]) -> tuple[SimState, list[CollisionEvent]]:
    """Detect and resolve disc-disc contacts.

    The fish is a disc of radius 0.35*BL.  On contact the inward normal
    component of the world-frame velocity is zeroed (tangential motion
    preserved), the center is pushed back onto the contact circle so that
    sustained thrust cannot creep through the obstacle, and an event is
    recorded.
    """
    if not obstacles:
        return state, []
    events = []
    r_fish = FISH_RADIUS_FRACTION * body.body_length
    x, y, u, v = state.x, state.y, state.u, state.v
    ct, st = math.cos(state.theta), math.sin(state.theta)
    for idx, obs in enumerate(obstacles):
        dx = x - obs.x
        dy = y - obs.y
        dist = math.hypot(dx, dy)
        if dist >= r_fish + obs.radius or dist == 0.0:
            continue
        nx, ny = dx / dist, dy / dist  # outward normal (obstacle -> fish)
        wx = u * ct - v * st
        wy = u * st + v * ct
        vn = wx * nx + wy * ny
        if vn < 0.0:  # moving into the obstacle
            wx -= vn * nx
            wy -= vn * ny
            u = wx * ct + wy * st
            v = -wx * st + wy * ct
        contact_dist = r_fish + obs.radius
        x = obs.x + nx * contact_dist
        y = obs.y + ny * contact_dist
        contact = (obs.x + nx * obs.radius, obs.y + ny * obs.radius)
        events.append(CollisionEvent(t=state.t, obstacle_index=idx, contact_point=contact))
    if events:
        state = replace(state, x=x, y=y, u=u, v=v)
    return state, events


class ScenarioRunner:
    """Tick-by-tick lockstep driver around the RK4 integrator.

    Owns the full integration state including the per-fin spin-up levels;
    the same runner backs schedule-driven simulation, the interactive
    server, and offline replay, so all three produce bit-identical state
    sequences from identical tick-stamped commands.
    """

    def __init__(self, scenario: Scenario, body: FishBody,
                 thrust_lag_tau: float = 0.2):
        if thrust_lag_tau < 0:
            raise ValidationError("thrust_lag_tau must be >= 0")
        self.scenario = scenario
        self.body = body
        self.tau = thrust_lag_tau
        self.dt = scenario.dt
        self.tick = 0
        self.targets: tuple[bool, bool, bool] = (False, False, False)
        init = scenario.initial
        self._y = (init.x, init.y, init.theta, init.u, init.v, init.r)
        self._t0 = init.t
        self._levels = (0.0, 0.0, 0.0)
        self._tables = _fin_tables(body)

    @property
    def t(self) -> float:
        return self._t0 + self.tick * self.dt

    def state(self) -> SimState:
        return SimState(self.t, *self._y)

    def set_fins(self, fins: tuple[bool, bool, bool]) -> None:
        self.targets = (bool(fins[0]), bool(fins[1]), bool(fins[2]))

    def advance(self) -> list[CollisionEvent]:
        """Advance one tick; returns collision events raised by this tick."""
        targets = tuple(1.0 if b else 0.0 for b in self.targets)
        if self.tau > 0.0:
            y9 = self._y + self._levels
            y9_new = self._rk4_with_lag(y9, targets)
            y_new, levels = y9_new[:6], y9_new[6:]
        else:
            levels = targets
            y_new = _rk4(self._y, levels, self.body, self._tables, self.dt)
        self.tick += 1
        _check_finite(y_new, self.t)
        state = SimState(self.t, *y_new)
        state, events = check_collision(state, self.body, self.scenario.obstacles)
        self._y = (state.x, state.y, state.theta, state.u, state.v, state.r)
        self._levels = tuple(levels)
        return events

    def _rk4_with_lag(self, y9, targets):
        body, tables, dt, tau = self.body, self._tables, self.dt, self.tau

        def deriv(y):
            d6 = _derivatives(y[:6], y[6:], body, tables)
            dlag = tuple((targets[i] - y[6 + i]) / tau for i in range(3))
            return d6 + dlag

        k1 = deriv(y9)
        y2 = tuple(y9[i] + 0.5 * dt * k1[i] for i in range(9))
        k2 = deriv(y2)
        y3 = tuple(y9[i] + 0.5 * dt * k2[i] for i in range(9))
        k3 = deriv(y3)
        y4 = tuple(y9[i] + dt * k3[i] for i in range(9))
        k4 = deriv(y4)
        return tuple(
            y9[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            for i in range(9)
        )


def simulate(scenario: Scenario, body: FishBody, thrust_lag_tau: float = 0.2,
             decimation: int = 1) -> Trajectory:
    """Run a scenario to completion with schedule-driven fin activation.

    Output is sampled every ``decimation`` ticks (the initial state is
    always included).  Collision events are recorded with their tick time.
    """
    if decimation < 1:
        raise ValidationError("decimation must be >= 1")
    runner = ScenarioRunner(scenario, body, thrust_lag_tau)
    n_steps = int(round(scenario.duration / scenario.dt))
    traj = Trajectory(states=[runner.state()],
                      fins=[scenario.fins_at(runner.t)], events=[])
    for k in range(n_steps):
        runner.set_fins(scenario.fins_at(runner.t))
        events = runner.advance()
        traj.events.extend(events)
        if (k + 1) % decimation == 0 or k == n_steps - 1:
            traj.states.append(runner.state())
            traj.fins.append(runner.targets)
    return traj


def replay_commands(scenario: Scenario, body: FishBody,
                    commands: list[tuple[int, tuple[bool, bool, bool]]],
                    n_ticks: int, thrust_lag_tau: float = 0.2) -> Trajectory:
    """Re-run a tick-stamped fin command log; every tick is sampled.

    A command (k, fins) takes effect while advancing from tick k to k+1,
    matching how the interactive server applies commands.
    """
    runner = ScenarioRunner(scenario, body, thrust_lag_tau)
    by_tick: dict[int, tuple[bool, bool, bool]] = {}
    for tick, fins in commands:
        by_tick[int(tick)] = tuple(bool(b) for b in fins)
    traj = Trajectory(states=[runner.state()], fins=[runner.targets], events=[])
    for k in range(n_ticks):
        if k in by_tick:
            runner.set_fins(by_tick[k])
        events = runner.advance()
        traj.events.extend(events)
        traj.states.append(runner.state())
        traj.fins.append(runner.targets)
    return traj


@dataclass(frozen=True)
class TrajectorySummary:
    """Steady-state metrics extracted from the last part of a trajectory."""

    steady_speed: float
    steady_yaw_rate: float
    turning_radius: float  # math.inf for straight runs
    time_to_steady: float
    path: tuple[SimState, ...]

    def __post_init__(self):
        if self.steady_speed < 0:
            raise ValidationError("steady_speed must be >= 0")
        if not (self.turning_radius > 0 or math.isinf(self.turning_radius)):
            raise ValidationError("turning_radius must be > 0 or inf")


# yaw rates below this are treated as straight-line motion
_STRAIGHT_YAW_THRESHOLD = 1.0e-3


def _fit_circle_radius(xs, ys) -> float:
    """Least-squares (Kasa) circle fit; returns the radius."""
    a = np.column_stack([xs, ys, np.ones(len(xs))])
    b = np.asarray(xs) ** 2 + np.asarray(ys) ** 2
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    d, e, f = coef
    return math.sqrt(max(f + d * d / 4.0 + e * e / 4.0, 0.0))


def summarize(trajectory: Trajectory | list[SimState],
              steady_window_fraction: float = 0.3) -> TrajectorySummary:
    """Steady metrics over the final window of a trajectory.

    steady_speed and steady_yaw_rate are means over the last
    ``steady_window_fraction`` of simulated time; turning_radius is a
    least-squares circle fit to the window path (inf when the mean yaw
    rate is below 1e-3 rad/s); time_to_steady is the first time after
    which the speed stays within 2% of the steady value.
    """
    states = trajectory.states if isinstance(trajectory, Trajectory) else list(trajectory)
    if len(states) < 2:
        raise ValidationError("trajectory too short to summarize")
    t0, t1 = states[0].t, states[-1].t
    if t1 - t0 <= 2.0:
        raise ValidationError("trajectory must span more than 2 s")
    if not 0.0 < steady_window_fraction <= 1.0:
        raise ValidationError("steady_window_fraction must be in (0, 1]")
    t_window = t1 - steady_window_fraction * (t1 - t0)
    window = [s for s in states if s.t >= t_window]
    if len(window) < 4:
        raise ValidationError("steady window too short (fewer than 4 samples)")

    speeds = [math.hypot(s.u, s.v) for s in window]
    steady_speed = sum(speeds) / len(speeds)
    steady_yaw = sum(s.r for s in window) / len(window)

    if abs(steady_yaw) < _STRAIGHT_YAW_THRESHOLD:
        radius = math.inf
    else:
        radius = _fit_circle_radius([s.x for s in window], [s.y for s in window])

    all_speeds = [math.hypot(s.u, s.v) for s in states]
    band = 0.02 * steady_speed
    time_to_steady = states[0].t
    if steady_speed > 1e-12:
        for i in range(len(states) - 1, -1, -1):
            if abs(all_speeds[i] - steady_speed) > band:
                time_to_steady = states[min(i + 1, len(states) - 1)].t
                break

    return TrajectorySummary(
        steady_speed=steady_speed,
        steady_yaw_rate=steady_yaw,
        turning_radius=radius,
        time_to_steady=time_to_steady,
        path=tuple(states),
    )


def kinetic_energy(state: SimState, body: FishBody) -> float:
    """Kinetic energy in the added-mass metric (J)."""
    return 0.5 * (
        (body.mass + body.added_mass_surge) * state.u**2
        + (body.mass + body.added_mass_sway) * state.v**2
        + (body.yaw_inertia + body.added_yaw_inertia) * state.r**2
    )


def solve_steady(body: FishBody, active: tuple[bool, bool, bool]) -> tuple[float, float, float]:
    """Steady-state (u, v, r) for a constant fin activation set.

    The force/moment balance can have several roots, so the velocity-only
    ODE is first integrated to the attractor (coarse RK4, no kinematics)
    and the balance is then polished with a Newton solve from that point.
    Used by calibration so objective evaluations avoid full time-domain
    runs while still matching what a simulation converges to.
    """
    from scipy.optimize import fsolve

    tables = _fin_tables(body)
    levels = tuple(1.0 if a else 0.0 for a in active)
    fx = sum(t[0] * lv for t, lv in zip(tables, levels))
    fy = sum(t[1] * lv for t, lv in zip(tables, levels))
    mz = sum(t[2] * lv for t, lv in zip(tables, levels))
    m_u = body.mass + body.added_mass_surge
    m_v = body.mass + body.added_mass_sway
    i_z = body.yaw_inertia + body.added_yaw_inertia
    rho = body.fluid_density

    du_s = 0.5 * rho * body.drag_area_surge
    dv_s = 0.5 * rho * body.drag_area_sway
    c_r = body.yaw_drag
    c_uu = body.yaw_drag_crossflow

    def balance(u, v, r):
        return (
            fx + m_v * v * r - du_s * abs(u) * u,
            fy - m_u * u * r - dv_s * abs(v) * v,
            mz - c_r * abs(r) * r - c_uu * u * u * r,
        )

    def deriv(u, v, r):
        bu, bv, br = balance(u, v, r)
        return bu / m_u, bv / m_v, br / i_z

    # coarse integration to the attractor, early exit once motion settles
    u = v = r = 0.0
    dt = 0.02
    for k in range(600):
        a1, b1, c1 = deriv(u, v, r)
        a2, b2, c2 = deriv(u + 0.5 * dt * a1, v + 0.5 * dt * b1, r + 0.5 * dt * c1)
        a3, b3, c3 = deriv(u + 0.5 * dt * a2, v + 0.5 * dt * b2, r + 0.5 * dt * c2)
        a4, b4, c4 = deriv(u + dt * a3, v + dt * b3, r + dt * c3)
        u += (dt / 6.0) * (a1 + 2 * a2 + 2 * a3 + a4)
        v += (dt / 6.0) * (b1 + 2 * b2 + 2 * b3 + b4)
        r += (dt / 6.0) * (c1 + 2 * c2 + 2 * c3 + c4)
        if not (math.isfinite(u) and math.isfinite(v) and math.isfinite(r)):
            u = v = r = 0.0  # diverged trial point; fall back to the Newton solve
            break
        if k % 25 == 24:
            da, db, dc = deriv(u, v, r)
            if abs(da) < 1e-7 and abs(db) < 1e-7 and abs(dc) < 1e-6:
                break

    sol, info, ier, _ = fsolve(lambda x: balance(*x), [u, v, r], full_output=True)
    if ier == 1:
        return float(sol[0]), float(sol[1]), float(sol[2])
    return float(u), float(v), float(r)


def trajectory_to_csv(traj: Trajectory) -> str:
    """Trajectory CSV with 9 significant digits per value."""
    lines = ["t_s,x_m,y_m,theta_rad,u_mps,v_mps,r_radps,fin_l,fin_r,fin_c"]
    for state, fins in zip(traj.states, traj.fins):
        vals = [state.t, state.x, state.y, state.theta, state.u, state.v, state.r]
        row = ",".join(f"{v:.9g}" for v in vals)
        row += "," + ",".join("1" if b else "0" for b in fins)
        lines.append(row)
    return "\n".join(lines) + "\n"


def trajectory_from_csv(text: str) -> Trajectory:
    """Parse a trajectory CSV produced by trajectory_to_csv."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    if header[:7] != ["t_s", "x_m", "y_m", "theta_rad", "u_mps", "v_mps", "r_radps"]:
        raise ValidationError("unrecognized trajectory CSV header")
    states = []
    fins = []
    for line in lines[1:]:
        parts = line.split(",")
        vals = [float(p) for p in parts[:7]]
        states.append(SimState(*vals))
        fins.append(tuple(p == "1" for p in parts[7:10]))
    return Trajectory(states=states, fins=fins, events=[])
