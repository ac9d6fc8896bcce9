"""User-to-access-point matching and coverage accounting.

Each ground user connects to the in-range aerial agent offering the best
received power ``rho * dist^(-eta)`` over the 3-D distance (horizontal
offset plus the fixed flight height). Since the score is strictly
decreasing in distance this is the nearest in-range agent; ties break to
the lowest agent id so reruns are identical. No capacity limit is applied
at matching time -- overload is handled by the control forces.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class Assignment:
    """Result of one matching pass over a world snapshot."""

    owner: np.ndarray           # (M,) agent id per user, -1 if unassigned
    loads: np.ndarray           # (L,) users served per agent
    coverage_ratio: float       # assigned / M (0 for an empty user set)


def assign_msds(msd_pos, map_pos, map_height, alive, rho, eta, comm_range):
    """Match every user to its best in-range alive agent."""
    if rho <= 0 or eta <= 0 or comm_range <= 0:
        raise ValueError("rho, eta and comm_range must be positive")
    n_msds = len(msd_pos)
    n_maps = len(map_pos)
    owner = np.full(n_msds, -1, dtype=int)
    alive_ids = np.flatnonzero(alive)
    if alive_ids.size and n_msds:
        diff = msd_pos[:, None, :] - map_pos[None, alive_ids, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff) + map_height * map_height)
        score = rho * dist ** (-eta)
        score[dist > comm_range] = -np.inf
        best = np.argmax(score, axis=1)          # first index wins ties -> lowest id
        reachable = np.isfinite(score[np.arange(n_msds), best])
        owner[reachable] = alive_ids[best[reachable]]
    loads = np.bincount(owner[owner >= 0], minlength=n_maps)
    coverage = float(np.count_nonzero(owner >= 0)) / n_msds if n_msds else 0.0
    return Assignment(owner=owner, loads=loads, coverage_ratio=coverage)


def goal_coverage(assignment: Assignment, clusters, cluster_id):
    """Fraction of one cluster's users currently assigned to any agent."""
    for cluster in clusters:
        if cluster.id == cluster_id:
            return float(np.count_nonzero(assignment.owner[cluster.members] >= 0)) \
                / len(cluster.members)
    raise KeyError(f"unknown cluster id {cluster_id}")


def cluster_coverages(assignment: Assignment, clusters):
    """Per-cluster coverage fractions, indexed by cluster id."""
    out = np.zeros(len(clusters))
    for cluster in clusters:
        out[cluster.id] = goal_coverage(assignment, clusters, cluster.id)
    return out
