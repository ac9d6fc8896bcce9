"""Discrete-time simulation loop: match, share, switch, steer, integrate.

One step executes, in order:

1. user-to-agent matching on the pre-step state,
2. idealized information sharing: achieved-goal sets are unioned across
   each connected component of the aerial graph (the protocol-level
   message passing is emulated centrally),
3. the mode machine for every alive agent, in id order,
4. control forces for every alive agent from the common pre-step
   position/velocity/load snapshot,
5. forward-Euler integration ``p += u*dt; q += p*dt``,
6. metrics captured on the post-step state.

Dead agents are frozen and invisible to every phase. Runs are
deterministic given the seed: randomness is consumed only by scenario
generation and failure injection, in that order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import control as ctl
from .association import assign_msds, cluster_coverages
from .netgraph import cluster_mst, connected_components, fiedler_value
from .world import ScenarioConfig, World, adjacency_matrix, generate_scenario

# sliding-window convergence criterion (reported, not used for early exit)
CONVERGENCE_WINDOW_S = 5.0
CONVERGENCE_COVERAGE_BAND = 0.005


class SimulationDiverged(RuntimeError):
    """Non-finite state detected during integration."""


@dataclass
class MetricsSample:
    """Per-step record of the global health of the network."""

    t: float
    coverage_ratio: float
    fiedler: float
    cluster_coverage: np.ndarray   # (K,) per-cluster coverage
    alive_count: int
    mode_counts: tuple             # (#Dynamic, #Bridge, #Static) among alive


@dataclass
class RunResult:
    config: ScenarioConfig
    samples: list                  # list[MetricsSample], one per step plus t=0
    world: World                   # final state
    mode_changes: list             # agents that changed mode, per step
    convergence_time: float | None
    trajectory: list | None        # optional (t, id, x, y, vx, vy, mode, alive) rows

    @property
    def final(self) -> MetricsSample:
        return self.samples[-1]

    def coverage_series(self):
        return (np.array([s.t for s in self.samples]),
                np.array([s.coverage_ratio for s in self.samples]))

    def fiedler_series(self):
        return (np.array([s.t for s in self.samples]),
                np.array([s.fiedler for s in self.samples]))


def measure(world: World, params: ctl.ControlParams, t: float) -> MetricsSample:
    """Omniscient metrics of a world snapshot (fresh matching pass)."""
    asg = assign_msds(world.msd_pos, world.map_pos, world.map_height, world.alive,
                      params.rho, params.eta, params.r)
    adj = adjacency_matrix(world.map_pos, world.alive, params.r)
    alive_adj = adj[np.ix_(world.alive, world.alive)].astype(float)
    lam2 = fiedler_value(alive_adj) if world.alive.any() else 0.0
    modes = world.mode[world.alive]
    counts = tuple(int(np.count_nonzero(modes == m)) for m in
                   (ctl.MODE_DYNAMIC, ctl.MODE_BRIDGE, ctl.MODE_STATIC))
    return MetricsSample(
        t=t,
        coverage_ratio=asg.coverage_ratio,
        fiedler=lam2,
        cluster_coverage=cluster_coverages(asg, world.clusters),
        alive_count=int(np.count_nonzero(world.alive)),
        mode_counts=counts,
    )


def share_achieved_goals(world: World, adjacency):
    """Union achieved-goal knowledge within each connected alive component."""
    ids = np.flatnonzero(world.alive)
    if ids.size == 0:
        return
    sub = adjacency[np.ix_(ids, ids)]
    labels = connected_components(sub.astype(float))
    for comp in range(labels.max() + 1):
        members = ids[labels == comp]
        union = set().union(*(world.achieved[i] for i in members))
        for i in members:
            world.achieved[i] = set(union)


def euler_update(pos, vel, accel, alive, dt):
    """Forward-Euler kinematics in place: v += u*dt, then q += v*dt."""
    vel[alive] += accel[alive] * dt
    pos[alive] += vel[alive] * dt


def step(world: World, params: ctl.ControlParams, thresholds: ctl.ModeThresholds,
         dt: float, t_next: float):
    """Advance the world by one step; returns (sample, mode_change_count)."""
    # 1: matching on the pre-step state
    asg = assign_msds(world.msd_pos, world.map_pos, world.map_height, world.alive,
                      params.rho, params.eta, params.r)
    cov = cluster_coverages(asg, world.clusters)

    # 2: idealized information sharing per connected component
    adj = adjacency_matrix(world.map_pos, world.alive, params.r)
    share_achieved_goals(world, adj)

    # 3: mode machine, deterministic id order; bridge staffing counts are
    # updated as agents adopt edges so simultaneous switchers spread out
    bridge_counts = {}
    for i in np.flatnonzero(world.alive & (world.mode == ctl.MODE_BRIDGE)):
        edge = (int(world.goal_a[i]), int(world.goal_b[i]))
        bridge_counts[edge] = bridge_counts.get(edge, 0) + 1
    mst_cache = {}

    def mst_lookup(key):
        if key not in mst_cache:
            mst_cache[key] = cluster_mst(key, world.centroids)
        return mst_cache[key]

    changes = 0
    for i in np.flatnonzero(world.alive):
        new_mode, ga, gb = ctl.mode_switch(
            int(world.mode[i]), int(world.goal_a[i]), int(world.goal_b[i]),
            int(asg.loads[i]), world.achieved[i], cov, world.centroids,
            world.map_pos[i], mst_lookup, bridge_counts, thresholds, params.r)
        if new_mode != world.mode[i]:
            changes += 1
        world.mode[i], world.goal_a[i], world.goal_b[i] = new_mode, ga, gb

    # 4-5: forces from the shared pre-step snapshot, then integration
    accel = ctl.flock_accelerations(world.map_pos, world.map_vel, asg.loads,
                                    world.alive, world.mode, world.goal_a,
                                    world.goal_b, world.centroids, adj, params)
    euler_update(world.map_pos, world.map_vel, accel, world.alive, dt)
    if not (np.all(np.isfinite(world.map_pos[world.alive]))
            and np.all(np.isfinite(world.map_vel[world.alive]))):
        raise SimulationDiverged(f"non-finite state at t={t_next:.3f}")

    # 6: metrics on the post-step state
    return measure(world, params, t_next), changes


def inject_failures(world: World, fraction: float, rng: np.random.Generator):
    """Kill floor(fraction * alive) uniformly chosen alive agents in place."""
    if not (0.0 <= fraction <= 1.0):
        raise ValueError("failure fraction must lie in [0, 1]")
    alive_ids = np.flatnonzero(world.alive)
    n_kill = int(math.floor(fraction * alive_ids.size))
    if n_kill:
        world.alive[rng.choice(alive_ids, size=n_kill, replace=False)] = False


def detect_convergence(samples, mode_changes, dt):
    """Earliest time at which coverage stays within a narrow band over the
    trailing window and no agent changed mode; None if never reached."""
    window = int(round(CONVERGENCE_WINDOW_S / dt))
    coverage = np.array([s.coverage_ratio for s in samples])
    for end in range(window, len(samples)):
        band = coverage[end - window:end + 1]
        if band.max() - band.min() < CONVERGENCE_COVERAGE_BAND \
                and sum(mode_changes[end - window:end]) == 0:
            return samples[end].t
    return None


def run(config: ScenarioConfig, record_trajectories: bool = False) -> RunResult:
    """Execute a full scenario: generation, stepping, failure schedule."""
    rng = np.random.default_rng(config.seed)
    world = generate_scenario(config, rng)
    params, thresholds, dt = config.control, config.thresholds, config.dt
    n_steps = math.ceil(config.t_end / dt - 1e-9)
    pending = sorted(config.failures)
    trajectory = [] if record_trajectories else None

    def record(t):
        if trajectory is None:
            return
        for i in range(world.n_maps):
            trajectory.append((t, i, world.map_pos[i, 0], world.map_pos[i, 1],
                               world.map_vel[i, 0], world.map_vel[i, 1],
                               int(world.mode[i]), int(world.alive[i])))

    samples = [measure(world, params, 0.0)]
    record(0.0)
    mode_changes = []
    for k in range(1, n_steps + 1):
        t_pre = (k - 1) * dt
        while pending and pending[0][0] <= t_pre + 1e-9:
            inject_failures(world, pending.pop(0)[1], rng)
        try:
            sample, changed = step(world, params, thresholds, dt, k * dt)
        except SimulationDiverged as exc:
            raise SimulationDiverged(f"step {k}: {exc}") from None
        samples.append(sample)
        mode_changes.append(changed)
        record(k * dt)

    return RunResult(
        config=config,
        samples=samples,
        world=world,
        mode_changes=mode_changes,
        convergence_time=detect_convergence(samples, mode_changes, dt),
        trajectory=trajectory,
    )
