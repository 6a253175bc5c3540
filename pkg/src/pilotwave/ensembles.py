"""Monte Carlo ensembles over beable positions.

Provides equilibrium sampling by rejection, vectorized ensemble evolution
(deterministic guidance or the stochastic two-branch process), histogram
densities on cubic grids, and the coarse-grained H-function

    Hbar = sum_cells rho_bar ln(rho_bar / q_bar) * cell_volume,

a relative entropy between the ensemble histogram rho_bar and the
coarse-grained quantum density q_bar.  Hbar vanishes in quantum equilibrium
and its decay measures relaxation toward it.

The plug-in histogram estimator of Hbar carries a positive bias of roughly
(cells)/(2 n); by default the reported value subtracts (K - 1)/(2 n) where K
is the number of cells with nonzero coarse-grained density.  The raw sum is
available with ``bias_corrected=False``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from pilotwave.dynamics import DENSITY_FLOOR, ZAG, ZIG, _spin_current
from pilotwave.rng import stream_generator
from pilotwave.states import ZigzagState

__all__ = [
    "Grid",
    "EnsembleFrame",
    "sample_density",
    "sample_zigzag_frame",
    "WeylEnsembleMover",
    "ZigzagEnsembleMover",
    "evolve_ensemble",
    "coarse_grained_H",
    "relative_entropy_frames",
    "h_curve",
]


@dataclass(frozen=True)
class Grid:
    """Axis-aligned box partitioned into cubic cells of side ``cell``."""

    lo: tuple
    hi: tuple
    cell: float

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != (3,) or hi.shape != (3,):
            raise ValueError("grid bounds must be 3-vectors")
        if np.any(hi <= lo):
            raise ValueError("grid box must have positive extent")
        if self.cell <= 0.0:
            raise ValueError("cell size must be > 0")
        counts = (hi - lo) / self.cell
        rounded = np.rint(counts)
        if np.any(np.abs(counts - rounded) > 1e-9 * np.maximum(1.0, counts)):
            raise ValueError("cell size must partition the box into whole cells")
        object.__setattr__(self, "lo", tuple(lo))
        object.__setattr__(self, "hi", tuple(hi))
        object.__setattr__(self, "shape", tuple(int(c) for c in rounded))

    @property
    def cell_volume(self) -> float:
        return self.cell ** 3

    @property
    def n_cells(self) -> int:
        nx, ny, nz = self.shape
        return nx * ny * nz

    def edges(self):
        lo = np.asarray(self.lo)
        return [lo[a] + self.cell * np.arange(self.shape[a] + 1) for a in range(3)]

    def contains(self, positions) -> np.ndarray:
        x = np.asarray(positions, dtype=float)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((x >= lo) & (x <= hi), axis=-1)

    def histogram(self, positions) -> np.ndarray:
        """Per-cell counts; positions on the upper boundary fall in the last
        cell."""
        counts, _ = np.histogramdd(np.asarray(positions, dtype=float),
                                   bins=self.edges())
        return counts

    def average_density(self, density) -> np.ndarray:
        """Per-cell midpoint-plus-corners average of a scalar field.

        The nine values (eight cell corners and the midpoint) are averaged
        with equal weight.  ``density`` maps points of shape (..., 3) to
        nonnegative values.
        """
        ex, ey, ez = self.edges()
        corner_pts = np.stack(np.meshgrid(ex, ey, ez, indexing="ij"), axis=-1)
        corner_vals = np.asarray(density(corner_pts), dtype=float)
        corner_sum = np.zeros(self.shape)
        for dx, dy, dz in itertools.product((0, 1), repeat=3):
            nx, ny, nz = self.shape
            corner_sum += corner_vals[dx:dx + nx, dy:dy + ny, dz:dz + nz]
        mx, my, mz = [0.5 * (e[:-1] + e[1:]) for e in (ex, ey, ez)]
        mid_pts = np.stack(np.meshgrid(mx, my, mz, indexing="ij"), axis=-1)
        mid_vals = np.asarray(density(mid_pts), dtype=float)
        return (corner_sum + mid_vals) / 9.0


@dataclass
class EnsembleFrame:
    """Beable positions (and branch labels) at one time."""

    t: float
    positions: np.ndarray
    branches: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        if self.positions.shape[0] < 1:
            raise ValueError("a frame needs at least one position")
        if self.branches is not None:
            self.branches = np.asarray(self.branches)
            if self.branches.shape != (self.positions.shape[0],):
                raise ValueError("one branch label per position required")

    def __len__(self):
        return self.positions.shape[0]


def _scan_bound(density, lo, hi, scan: int, safety: float) -> float:
    axes = [np.linspace(lo[a], hi[a], scan) for a in range(3)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.asarray(density(pts.reshape(-1, 3)), dtype=float)
    peak = float(np.max(vals))
    if not np.isfinite(peak) or peak <= 0.0:
        raise ValueError("density is identically zero (or not finite) on the box")
    return safety * peak


def sample_density(density, box, n: int, seed: int, *, t: float = 0.0,
                   scan: int = 33, safety: float = 1.5,
                   stream: int = 0) -> EnsembleFrame:
    """Draw n points distributed proportionally to ``density`` on ``box``.

    Rejection sampling against a uniform proposal.  The envelope constant is
    ``safety`` times the densest value found by a ``scan``^3 grid scan of the
    box.  Reproducible for a given seed (Philox stream).  Raises if the
    density vanishes on the box or if the acceptance rate falls below 1e-6.
    """
    if n < 1:
        raise ValueError("need n >= 1 samples")
    lo = np.asarray(box[0], dtype=float)
    hi = np.asarray(box[1], dtype=float)
    if lo.shape != (3,) or hi.shape != (3,) or np.any(hi <= lo):
        raise ValueError("box must be ((lo3,), (hi3,)) with hi > lo")
    bound = _scan_bound(density, lo, hi, scan, safety)

    rng = stream_generator(seed, stream)
    out = np.empty((n, 3))
    got = 0
    proposed = 0
    batch = max(4096, 2 * n)
    while got < n:
        pts = lo + (hi - lo) * rng.random((batch, 3))
        vals = np.asarray(density(pts), dtype=float)
        if np.any(vals > bound):
            raise ValueError("grid-scan envelope exceeded; increase scan or safety")
        keep = rng.random(batch) * bound < vals
        take = min(int(keep.sum()), n - got)
        out[got:got + take] = pts[keep][:take]
        got += take
        proposed += batch
        if proposed >= max(2_000_000, 100 * n) and got < max(1, proposed * 1e-6):
            raise ValueError("bound too loose: acceptance rate below 1e-6")
    return EnsembleFrame(t, out, meta={"seed": int(seed), "proposals": proposed,
                                       "bound": bound})


def sample_zigzag_frame(state: ZigzagState, box, n: int, seed: int, *,
                        t: float = 0.0, stream: int = 0) -> EnsembleFrame:
    """Equilibrium frame for the two-branch electron.

    Positions follow the total density Psi_L^dag Psi_L + Psi_R^dag Psi_R;
    each beable's branch is then zig or zag with the local relative branch
    densities as probabilities.
    """
    frame = sample_density(lambda x: state.rho_total(t, x), box, n, seed, t=t,
                           stream=stream)
    psi_l, psi_r = state.psi_pair(t, frame.positions)
    rho_l = np.sum(np.abs(psi_l) ** 2, axis=-1)
    rho_r = np.sum(np.abs(psi_r) ** 2, axis=-1)
    u = stream_generator(seed, stream + 1).random(len(frame))
    zag = u < rho_r / (rho_l + rho_r)
    frame.branches = np.where(zag, ZAG, ZIG)
    return frame


class WeylEnsembleMover:
    """Advance every beable of an ensemble along a single-particle guidance
    field, all particles stepped together with RK4.

    Beables that run into a node (density at the floor) are frozen and
    reported in the output frame's metadata under ``node_hits``.
    """

    def __init__(self, wavefunction, dt: float = 0.01):
        self.wavefunction = wavefunction
        self.dt = float(dt)
        self._sign = 1.0 if wavefunction.handedness == "R" else -1.0

    def _flow(self, t, x, alive):
        rho, j = _spin_current(self.wavefunction(t, x))
        ok = rho > DENSITY_FLOOR
        alive &= ok
        v = np.zeros_like(j)
        np.divide(j, rho[..., None], out=v, where=ok[..., None])
        return self._sign * v

    def advance(self, frame: EnsembleFrame, t1: float, dt: float | None = None) -> EnsembleFrame:
        dt = self.dt if dt is None else float(dt)
        x = frame.positions.copy()
        alive = np.ones(len(frame), dtype=bool)
        t = frame.t
        for h in _steps(frame.t, t1, dt):
            k1 = self._flow(t, x, alive)
            k2 = self._flow(t + 0.5 * h, x + 0.5 * h * k1, alive)
            k3 = self._flow(t + 0.5 * h, x + 0.5 * h * k2, alive)
            k4 = self._flow(t + h, x + h * k3, alive)
            step = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            x[alive] += step[alive]
            t += h
        if not alive.any():
            raise RuntimeError(f"all {len(frame)} trajectories hit nodes")
        meta = dict(frame.meta)
        meta["node_hits"] = meta.get("node_hits", 0) + int((~alive).sum())
        return EnsembleFrame(t1, x[alive], meta=meta)


class ZigzagEnsembleMover:
    """Advance a labelled ensemble under the stochastic two-branch process.

    All particles are stepped together; each carries its own exponential
    jump threshold drawn from a per-particle Philox stream keyed by
    (seed, particle index), so results are independent of execution order
    and reproducible for a given seed.
    """

    _BLOCK = 64

    def __init__(self, state: ZigzagState, seed: int, dt: float = 0.01,
                 stream_base: int = 1 << 32):
        self.state = state
        self.seed = int(seed)
        self.dt = float(dt)
        # particle i draws from Philox stream (seed, stream_base + i); the
        # base keeps mover streams clear of the sampler's streams and lets a
        # second ensemble under the same seed stay independent
        self.stream_base = int(stream_base)

    def _thresholds(self, n, count):
        """First ``count`` exponential thresholds for each of n particles."""
        out = np.empty((n, count))
        for i in range(n):
            out[i] = stream_generator(self.seed,
                                      self.stream_base + i).standard_exponential(count)
        return out

    def _fields(self, t, x, zig):
        """Velocity and leave-rate for each particle given its branch mask."""
        psi_l, psi_r = self.state.psi_pair(t, x)
        rho_l, j_l = _spin_current(psi_l)
        rho_r, j_r = _spin_current(psi_r)
        rho = np.where(zig, rho_l, rho_r)
        ok = rho > DENSITY_FLOOR
        j = np.where(zig[..., None], -j_l, j_r)
        v = np.zeros_like(j)
        np.divide(j, rho[..., None], out=v, where=ok[..., None])
        if self.state.single_momentum:
            imbalance = np.zeros_like(rho)
        else:
            imbalance = np.imag(np.sum(np.conj(psi_l) * psi_r, axis=-1))
        flow = np.where(zig, np.maximum(-imbalance, 0.0), np.maximum(imbalance, 0.0))
        rate = np.zeros_like(rho)
        np.divide(2.0 * self.state.m * flow, rho, out=rate, where=ok)
        return v, rate, ok

    def advance(self, frame: EnsembleFrame, t1: float, dt: float | None = None) -> EnsembleFrame:
        if frame.branches is None:
            raise ValueError("zig-zag evolution needs branch labels in the frame")
        dt = self.dt if dt is None else float(dt)
        n = len(frame)
        x = frame.positions.copy()
        zig = np.asarray(frame.branches) == ZIG
        alive = np.ones(n, dtype=bool)

        jumps_done = frame.meta.get("_jump_counts")
        jumps_done = np.zeros(n, dtype=int) if jumps_done is None else jumps_done.copy()
        stash = self._thresholds(n, self._BLOCK + int(jumps_done.max()))
        threshold = stash[np.arange(n), jumps_done]
        hazard = np.asarray(frame.meta.get("_hazard", np.zeros(n))).copy()
        warn = 0

        def rk4(tt, xx, hh, zz):
            col = hh[..., None] if np.ndim(hh) else hh
            k1, _, _ = self._fields(tt, xx, zz)
            k2, _, _ = self._fields(tt + 0.5 * hh, xx + 0.5 * col * k1, zz)
            k3, _, _ = self._fields(tt + 0.5 * hh, xx + 0.5 * col * k2, zz)
            k4, r_end, ok_end = self._fields(tt + hh, xx + col * k3, zz)
            return xx + (col / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), r_end, ok_end

        t = frame.t
        _, rate_here, ok0 = self._fields(t, x, zig)
        alive &= ok0
        for h in _steps(frame.t, t1, dt):
            remaining = np.full(n, h)
            active = alive.copy()
            for _ in range(200):
                idx = np.flatnonzero(active)
                if idx.size == 0:
                    break
                tt = t + (h - remaining[idx])
                x_new, rate_new, ok_new = rk4(tt, x[idx], remaining[idx], zig[idx])
                alive[idx] &= ok_new
                warn += int(np.sum(rate_new * remaining[idx] > 0.5))
                dh = 0.5 * (rate_here[idx] + rate_new) * remaining[idx]
                crossed = (hazard[idx] + dh >= threshold[idx]) & (dh > 0.0) & alive[idx]

                done = idx[~crossed]
                hazard[done] += dh[~crossed]
                x[done] = x_new[~crossed]
                rate_here[done] = rate_new[~crossed]
                active[done] = False

                jump = idx[crossed]
                if jump.size:
                    frac = np.clip((threshold[jump] - hazard[jump]) / dh[crossed], 0.0, 1.0)
                    tau = frac * remaining[jump]
                    x_j, _, ok_j = rk4(t + (h - remaining[jump]), x[jump], tau, zig[jump])
                    alive[jump] &= ok_j
                    x[jump] = x_j
                    zig[jump] = ~zig[jump]
                    jumps_done[jump] += 1
                    need = int(jumps_done.max())
                    if need >= stash.shape[1]:
                        stash = self._thresholds(n, need + self._BLOCK)
                    threshold[jump] = stash[jump, jumps_done[jump]]
                    hazard[jump] = 0.0
                    _, r_flip, ok_flip = self._fields(t + (h - remaining[jump] + tau),
                                                      x[jump], zig[jump])
                    alive[jump] &= ok_flip
                    rate_here[jump] = r_flip
                    remaining[jump] -= tau
                    settled = jump[remaining[jump] <= 1e-12 * dt]
                    active[settled] = False
            else:
                raise RuntimeError("jump iteration did not terminate within one step")
            t += h

        if not alive.any():
            raise RuntimeError(f"all {len(frame)} trajectories hit nodes")
        meta = dict(frame.meta)
        meta["node_hits"] = meta.get("node_hits", 0) + int((~alive).sum())
        meta["rate_dt_warnings"] = meta.get("rate_dt_warnings", 0) + warn
        meta["jumps"] = meta.get("jumps", 0) + int(jumps_done[alive].sum())
        meta["_jump_counts"] = jumps_done[alive]
        meta["_hazard"] = hazard[alive]
        branches = np.where(zig, ZIG, ZAG)
        return EnsembleFrame(t1, x[alive], branches=branches[alive], meta=meta)


def _steps(t0, t1, dt):
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


def evolve_ensemble(mover, frame: EnsembleFrame, t1: float,
                    dt: float | None = None, *, max_node_fraction: float = 0.01) -> EnsembleFrame:
    """Advance every beable of ``frame`` to time t1 with ``mover``.

    Node-hit trajectories are excluded from the output frame and counted in
    its metadata; more than ``max_node_fraction`` of them is an error (it
    signals a pathological state or box).
    """
    before = len(frame)
    out = mover.advance(frame, t1, dt)
    lost = before - len(out)
    if lost > max_node_fraction * before:
        raise RuntimeError(
            f"{lost} of {before} trajectories hit nodes (> {max_node_fraction:.0%})")
    return out


def relative_entropy_frames(frame: EnsembleFrame, reference: EnsembleFrame,
                            grid: Grid, *, bias_corrected: bool = True) -> float:
    """Coarse-grained H of a frame against an empirical reference ensemble.

    For unconfined states the equilibrium comparison density at time t is
    the quantum density restricted to the flow image of the initial support,
    which has no closed form; an equilibrium-sampled ensemble evolved by the
    same dynamics estimates it without bias.  Reference cells that an
    ensemble member occupies but no reference member does are floored at
    half a count (they reflect reference undersampling only).  The plug-in
    bias of both histograms, (K - 1)/2 * (1/n + 1/n_ref), is subtracted by
    default.
    """
    for fr, name in ((frame, "frame"), (reference, "reference")):
        if not np.all(grid.contains(fr.positions)):
            raise ValueError(f"{name} positions outside the grid box")
    counts = grid.histogram(frame.positions)
    ref_counts = grid.histogram(reference.positions)
    n = counts.sum()
    n_ref = ref_counts.sum()
    occupied = counts > 0
    q_mass = np.maximum(ref_counts, 0.5)[occupied] / n_ref
    p_mass = counts[occupied] / n
    h_raw = float(np.sum(p_mass * np.log(p_mass / q_mass)))
    if not bias_corrected:
        return h_raw
    k = int((ref_counts > 0).sum())
    return h_raw - 0.5 * (k - 1) * (1.0 / n + 1.0 / n_ref)


def coarse_grained_H(frame: EnsembleFrame, density, grid: Grid, *,
                     bias_corrected: bool = True, renormalize: bool = True) -> float:
    """Coarse-grained H-function of a frame against a quantum density.

    ``density`` maps (t, points) to the quantum density.  The histogram
    density rho_bar uses counts/(n * cell volume); the quantum density is
    coarse-grained per cell by the midpoint-plus-corners average; empty cells
    contribute zero.  With ``renormalize=True`` the coarse-grained density is
    normalized over the grid box (shape comparison); with ``renormalize=False``
    it is used as given, for references whose normalization is fixed over a
    different region (e.g. an initial-time box whose equilibrium mass is
    conserved by the flow).  By default the multinomial plug-in bias
    (K - 1)/(2 n) is subtracted from the raw sum.
    """
    x = frame.positions
    inside = grid.contains(x)
    if not np.all(inside):
        raise ValueError(f"{int((~inside).sum())} frame positions outside the grid box")
    counts = grid.histogram(x)
    n = counts.sum()
    q = grid.average_density(lambda pts: density(frame.t, pts))
    if np.any(q < 0.0):
        raise ValueError("density evaluator returned negative values")
    if renormalize:
        total = q.sum() * grid.cell_volume
        if total <= 0.0:
            raise ValueError("density is zero over the whole grid box")
        q = q / total

    occupied = counts > 0
    if np.any(occupied & (q <= 0.0)):
        raise ValueError("support mismatch: samples in a cell with zero "
                         "coarse-grained density")
    p_mass = counts[occupied] / n
    q_mass = q[occupied] * grid.cell_volume
    h_raw = float(np.sum(p_mass * np.log(p_mass / q_mass)))
    if not bias_corrected:
        return h_raw
    k = int((q > 0.0).sum())
    return h_raw - (k - 1) / (2.0 * n)


def h_curve(mover, frame0: EnsembleFrame, grid, checkpoints, *,
            density=None, dt: float | None = None, bias_corrected: bool = True):
    """Evolve a frame through ``checkpoints`` and record the H-function.

    ``grid`` is a :class:`Grid` or a callable t -> Grid (for diagnostics that
    track a spreading ensemble).  ``density`` maps (t, points) to the quantum
    density; if omitted and the mover wraps a wavefunction or state, its
    density is used.  Returns a list of (t, Hbar) pairs.
    """
    if density is None:
        if hasattr(mover, "wavefunction"):
            density = lambda t, pts: mover.wavefunction.density(t, pts)
        elif hasattr(mover, "state"):
            density = lambda t, pts: mover.state.rho_total(t, pts)
        else:
            raise ValueError("pass density=... when the mover has no wavefunction")
    checkpoints = list(checkpoints)
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")

    def grid_at(t):
        return grid(t) if callable(grid) else grid

    frame = frame0
    curve = []
    for ck in checkpoints:
        if ck < frame.t:
            raise ValueError("checkpoints must not precede the frame time")
        if ck > frame.t:
            frame = evolve_ensemble(mover, frame, ck, dt)
        curve.append((ck, coarse_grained_H(frame, density, grid_at(ck),
                                           bias_corrected=bias_corrected)))
    return curve
