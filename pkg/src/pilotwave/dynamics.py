"""Guidance velocities, branch jump rates, and trajectory integration.

Deterministic trajectories follow a guidance velocity field with classical
fixed-step RK4.  The two-branch electron beable is a piecewise-deterministic
jump process: between jumps the position follows the velocity field of its
current branch ("zig" guided by Psi_L, "zag" by Psi_R); branch flips are
drawn from an exponential clock whose cumulative hazard is accumulated by the
trapezoid rule along the path.  Jumps change the branch label only -- the
position is continuous across a jump.

Randomness comes exclusively from Philox streams (see :mod:`pilotwave.rng`),
so every simulation is bit-reproducible given its 64-bit seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pilotwave.rng import stream_generator
from pilotwave.states import ZigzagState

__all__ = [
    "ZIG",
    "ZAG",
    "DENSITY_FLOOR",
    "ZeroDensityError",
    "NodeError",
    "Trajectory",
    "JumpEvent",
    "weyl_velocity",
    "dirac_velocity",
    "zigzag_jump_rate",
    "weyl_velocity_field",
    "zigzag_velocity_field",
    "dirac_velocity_field",
    "integrate_deterministic",
    "simulate_jump_process",
    "simulate_zigzag",
]

ZIG = "zig"   # guided by Psi_L
ZAG = "zag"   # guided by Psi_R
_OTHER = {ZIG: ZAG, ZAG: ZIG}

# Densities at or below this floor count as a node (wavefunction zero).
DENSITY_FLOOR = 1e-300

# A single rate * dt above this triggers a resolution warning in metadata.
RATE_DT_WARN = 0.5


class ZeroDensityError(ValueError):
    """Guidance quantity requested where the relevant density vanishes."""


class NodeError(RuntimeError):
    """A trajectory ran into a wavefunction node and was aborted."""

    def __init__(self, t: float):
        super().__init__(f"trajectory hit node at t={t}")
        self.t = t


def _spin_current(psi):
    """Return (density, psi^dag sigma psi) for amplitudes of shape (..., 2)."""
    c1 = psi[..., 0]
    c2 = psi[..., 1]
    a1 = c1.real * c1.real + c1.imag * c1.imag
    a2 = c2.real * c2.real + c2.imag * c2.imag
    cross = np.conj(c1) * c2
    j = np.stack([2.0 * cross.real, 2.0 * cross.imag, a1 - a2], axis=-1)
    return a1 + a2, j


def weyl_velocity(psi, chi: str) -> np.ndarray:
    """Guidance velocity of a single massless fermion.

    +psi^dag sigma psi / psi^dag psi for chi = "R" and the negative of that
    for chi = "L".  The Euclidean norm is exactly 1 (light-like current), so
    these beables always move luminally.
    """
    if chi not in ("R", "L"):
        raise ValueError(f"handedness must be 'R' or 'L', got {chi!r}")
    psi = np.asarray(psi, dtype=complex)
    rho, j = _spin_current(psi)
    if np.any(rho <= DENSITY_FLOOR):
        raise ZeroDensityError("velocity undefined at node")
    v = j / rho[..., None]
    return v if chi == "R" else -v


def dirac_velocity(psi_l, psi_r) -> np.ndarray:
    """Velocity of the massive electron in the deterministic picture.

    (Psi_R^dag sigma Psi_R - Psi_L^dag sigma Psi_L) / (Psi_L^dag Psi_L +
    Psi_R^dag Psi_R).  The difference of two light-like currents, so the
    speed is bounded by 1 but in general subluminal.
    """
    psi_l = np.asarray(psi_l, dtype=complex)
    psi_r = np.asarray(psi_r, dtype=complex)
    rho_l, j_l = _spin_current(psi_l)
    rho_r, j_r = _spin_current(psi_r)
    rho = rho_l + rho_r
    if np.any(rho <= DENSITY_FLOOR):
        raise ZeroDensityError("velocity undefined at node")
    return (j_r - j_l) / rho[..., None]


def _branch_imbalance(psi_l, psi_r):
    """Im(Psi_L^dag Psi_R), the signed jump-flow density between branches."""
    return np.imag(np.sum(np.conj(psi_l) * psi_r, axis=-1))


def zigzag_jump_rate(state: ZigzagState, t: float, x, from_branch: str) -> np.ndarray:
    """Branch-flip hazard at (t, x) for a beable currently on ``from_branch``.

    zag -> zig:  2 m [Im(Psi_L^dag Psi_R)]^+ / (Psi_R^dag Psi_R)
    zig -> zag:  2 m [Im(Psi_R^dag Psi_L)]^+ / (Psi_L^dag Psi_L)

    The two imaginary parts are exact negatives, so at any point at most one
    direction has a nonzero rate.  For a single momentum the relative phase
    of the two branches vanishes identically and both rates are exactly zero.
    """
    if from_branch not in (ZIG, ZAG):
        raise ValueError(f"branch must be 'zig' or 'zag', got {from_branch!r}")
    psi_l, psi_r = state.psi_pair(t, x)
    if state.single_momentum:
        imbalance = np.zeros(np.shape(psi_l)[:-1])
    else:
        imbalance = _branch_imbalance(psi_l, psi_r)
    if from_branch == ZAG:
        rho = np.sum(np.abs(psi_r) ** 2, axis=-1)
        flow = np.maximum(imbalance, 0.0)
    else:
        rho = np.sum(np.abs(psi_l) ** 2, axis=-1)
        flow = np.maximum(-imbalance, 0.0)
    if np.any(rho <= DENSITY_FLOOR):
        raise ZeroDensityError("jump rate undefined: branch density is zero")
    return 2.0 * state.m * flow / rho


def weyl_velocity_field(wf):
    """Velocity field evaluator (t, x) -> v for a Weyl wavefunction."""
    chi = wf.handedness

    def field(t, x):
        return weyl_velocity(wf(t, x), chi)

    return field


def zigzag_velocity_field(state: ZigzagState, branch: str):
    """Velocity field of one branch of the two-branch electron."""
    if branch not in (ZIG, ZAG):
        raise ValueError(f"branch must be 'zig' or 'zag', got {branch!r}")

    def field(t, x):
        psi_l, psi_r = state.psi_pair(t, x)
        if branch == ZIG:
            return weyl_velocity(psi_l, "L")
        return weyl_velocity(psi_r, "R")

    return field


def dirac_velocity_field(state: ZigzagState):
    """Velocity field of the deterministic massive-electron picture."""

    def field(t, x):
        return dirac_velocity(*state.psi_pair(t, x))

    return field


@dataclass
class Trajectory:
    """Time-ordered samples of one beable's path."""

    t: np.ndarray
    x: np.ndarray
    speed: np.ndarray
    branch: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        self.speed = np.asarray(self.speed, dtype=float)
        if self.branch is not None:
            self.branch = np.asarray(self.branch)
        if self.t.ndim != 1 or self.x.shape != (self.t.size, 3):
            raise ValueError("trajectory arrays must be (n,) and (n, 3)")
        if np.any(np.diff(self.t) <= 0.0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self):
        return self.t.size


@dataclass(frozen=True)
class JumpEvent:
    """One branch flip: the position is identical before and after."""

    t: float
    x: tuple
    from_branch: str
    to_branch: str


def _rk4_step(f, t, x, h):
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, x + (0.5 * h) * k2)
    k4 = f(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1


def _step_schedule(t0: float, t1: float, dt: float):
    """Uniform steps of dt from t0, with a shortened final partial step."""
    if t1 <= t0:
        raise ValueError("require t1 > t0")
    if dt <= 0.0:
        raise ValueError("require dt > 0")
    span = t1 - t0
    n_full = int(np.floor(span / dt + 1e-9))
    steps = [dt] * n_full
    tail = span - n_full * dt
    if tail > 1e-9 * dt:
        steps.append(tail)
    return steps


def integrate_deterministic(velocity_field, x0, t0: float, t1: float, dt: float,
                            meta: dict | None = None) -> Trajectory:
    """Integrate a deterministic guidance trajectory with fixed-step RK4.

    Samples are recorded at t0 and after every step; the speed column holds
    the field norm at each sample.  If the field hits a node (density below
    the floor) the run aborts with :class:`NodeError`.
    """
    x = np.array(x0, dtype=float).reshape(3)
    ts = [t0]
    xs = [x.copy()]
    speeds = []
    t = t0
    try:
        for h in _step_schedule(t0, t1, dt):
            x, k1 = _rk4_step(velocity_field, t, x, h)
            speeds.append(float(np.linalg.norm(k1)))
            t = t + h
            ts.append(t)
            xs.append(x.copy())
        speeds.append(float(np.linalg.norm(velocity_field(t, x))))
    except ZeroDensityError:
        raise NodeError(t) from None
    info = {"t0": t0, "t1": t1, "dt": dt}
    if meta:
        info.update(meta)
    return Trajectory(np.array(ts), np.array(xs), np.array(speeds), meta=info)


def simulate_jump_process(velocity, rate, x0, branch0: str, t0: float, t1: float,
                          dt: float, seed, *, meta: dict | None = None):
    """Piecewise-deterministic simulation of a two-branch beable.

    ``velocity(branch, t, x)`` gives the flow of each branch and
    ``rate(branch, t, x)`` the hazard of leaving it.  A threshold is drawn as
    E ~ Exp(1); the hazard integral is accumulated by the trapezoid rule over
    each RK4 step and the branch flips when the integral reaches E (the flip
    time inside a step is located by inverting the linearly interpolated
    cumulative hazard, which is exact for constant rates).  The position is
    unchanged by a flip.  Returns (Trajectory, [JumpEvent, ...]).
    """
    if branch0 not in (ZIG, ZAG):
        raise ValueError(f"branch must be 'zig' or 'zag', got {branch0!r}")
    rng = seed if isinstance(seed, np.random.Generator) else stream_generator(int(seed))

    x = np.array(x0, dtype=float).reshape(3)
    branch = branch0
    t = t0
    ts = [t0]
    xs = [x.copy()]
    branches = [branch]
    speeds = []
    events: list[JumpEvent] = []
    warn_count = 0

    threshold = rng.standard_exponential()
    hazard = 0.0
    try:
        rate_here = float(rate(branch, t, x))
        speeds.append(float(np.linalg.norm(velocity(branch, t, x))))
        for h in _step_schedule(t0, t1, dt):
            remaining = h
            # may iterate when a flip happens inside the step
            for _ in range(1000):
                def flow(tt, xx, _b=branch):
                    return velocity(_b, tt, xx)

                x_trial, _ = _rk4_step(flow, t, x, remaining)
                rate_trial = float(rate(branch, t + remaining, x_trial))
                if rate_trial * remaining > RATE_DT_WARN:
                    warn_count += 1
                dh = 0.5 * (rate_here + rate_trial) * remaining
                if hazard + dh < threshold or dh <= 0.0:
                    hazard += dh
                    t += remaining
                    x = x_trial
                    rate_here = rate_trial
                    break
                # flip inside this sub-interval
                frac = (threshold - hazard) / dh
                tau = frac * remaining
                if tau > 0.0:
                    x, _ = _rk4_step(flow, t, x, tau)
                    t += tau
                events.append(JumpEvent(t, tuple(x), branch, _OTHER[branch]))
                branch = _OTHER[branch]
                threshold = rng.standard_exponential()
                hazard = 0.0
                rate_here = float(rate(branch, t, x))
                if ts[-1] < t:
                    ts.append(t)
                    xs.append(x.copy())
                    branches.append(branch)
                    speeds.append(float(np.linalg.norm(velocity(branch, t, x))))
                remaining -= tau
                if remaining <= 1e-12 * dt:
                    remaining = 0.0
                    break
            else:
                raise RuntimeError("jump iteration did not terminate within one step")
            if ts[-1] < t:
                ts.append(t)
                xs.append(x.copy())
                branches.append(branch)
                speeds.append(float(np.linalg.norm(velocity(branch, t, x))))
    except ZeroDensityError:
        raise NodeError(t) from None

    info = {"t0": t0, "t1": t1, "dt": dt, "rate_dt_warnings": warn_count}
    if meta:
        info.update(meta)
    traj = Trajectory(np.array(ts), np.array(xs), np.array(speeds),
                      branch=np.array(branches), meta=info)
    return traj, events


def simulate_zigzag(state: ZigzagState, x0, branch0: str, t0: float, t1: float,
                    dt: float, seed):
    """Simulate the stochastic two-branch electron guided by ``state``.

    Between jumps the beable follows the luminal velocity of its branch;
    flips occur at the rates of :func:`zigzag_jump_rate`.  Reproducible given
    the 64-bit seed.  Returns (Trajectory, [JumpEvent, ...]).
    """
    cache = {}

    def pair(t, x):
        key = (t, x.tobytes())
        if key not in cache:
            cache.clear()
            cache[key] = state.psi_pair(t, x)
        return cache[key]

    def velocity(branch, t, x):
        psi_l, psi_r = pair(t, x)
        if branch == ZIG:
            return weyl_velocity(psi_l, "L")
        return weyl_velocity(psi_r, "R")

    def rate(branch, t, x):
        psi_l, psi_r = pair(t, x)
        imbalance = 0.0 if state.single_momentum else _branch_imbalance(psi_l, psi_r)
        if branch == ZAG:
            rho = np.sum(np.abs(psi_r) ** 2, axis=-1)
            flow = max(imbalance, 0.0)
        else:
            rho = np.sum(np.abs(psi_l) ** 2, axis=-1)
            flow = max(-imbalance, 0.0)
        if rho <= DENSITY_FLOOR:
            raise ZeroDensityError("jump rate undefined: branch density is zero")
        return 2.0 * state.m * flow / rho

    return simulate_jump_process(velocity, rate, x0, branch0, t0, t1, dt, seed,
                                 meta={"seed": int(seed) if not isinstance(seed, np.random.Generator) else None})
