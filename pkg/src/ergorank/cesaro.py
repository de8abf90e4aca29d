"""Incremental Cesaro means of operator powers.

For an operator T and a probe x the trajectory holds A_n x for
n = 1..horizon, where A_n x = (x + Tx + ... + T^(n-1) x) / n.  Extension
uses the running-mean recurrence

    A_(n+1) x = (n * A_n x + T^n x) / (n + 1)

so extending a horizon-N trajectory to N' costs N' - N operator
applications.  A matrix-level twin of the same recurrence produces the
sequence A_1..A_N as dense matrices for norm-level analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    DENSE_CAP,
    CapExceededError,
    DimensionMismatchError,
    OperatorSpec,
    apply_columns,
    as_dense,
    vec_norm,
)

#: Entry magnitudes beyond this are treated as divergence and truncate the
#: run.  The limit leaves headroom so norms (and norms of differences) of
#: anything the recurrence produced stay finite in double precision.
OVERFLOW_LIMIT = 1e140


@dataclass(eq=False)
class CesaroTrajectory:
    """Cesaro means of one probe up to a horizon.

    Attributes
    ----------
    values : list of ndarray
        ``values[n - 1]`` is A_n(probe) for n = 1..horizon.
    power_cursor : ndarray
        T^horizon(probe), ready for the next extension step.
    diverged_at : int or None
        Power index n at which ||T^n probe|| exceeded the overflow limit;
        the trajectory is truncated just before it.
    """

    probe: np.ndarray
    norm_tag: str
    horizon: int
    values: list
    power_cursor: np.ndarray
    diverged_at: int | None = None


def start_trajectory(spec: OperatorSpec, probe: np.ndarray) -> CesaroTrajectory:
    """Horizon-1 trajectory: A_1 x = x, with the power cursor at T x."""
    probe = np.asarray(probe, dtype=np.float64)
    if probe.shape != (spec.dim,):
        raise DimensionMismatchError(
            f"operator has dim {spec.dim} but probe has shape {probe.shape}"
        )
    cursor = apply_columns(spec, probe[:, None])[:, 0]
    return CesaroTrajectory(
        probe=probe,
        norm_tag=spec.norm_tag,
        horizon=1,
        values=[probe.copy()],
        power_cursor=cursor,
    )


def cesaro_extend(traj: CesaroTrajectory, spec: OperatorSpec, new_horizon: int) -> CesaroTrajectory:
    """Extend a trajectory to `new_horizon`, returning a new trajectory.

    The prefix of `values` is shared with the input (values are never
    mutated).  If some power norm exceeds the overflow limit the result is
    truncated at the last finite horizon and flagged via `diverged_at`.
    """
    if new_horizon < traj.horizon:
        raise ValueError(f"new horizon {new_horizon} is below current horizon {traj.horizon}")
    if traj.diverged_at is not None or new_horizon == traj.horizon:
        return traj
    values = list(traj.values)
    cursor = traj.power_cursor
    diverged_at = None
    n = traj.horizon
    while n < new_horizon:
        if not np.all(np.isfinite(cursor)) or np.max(np.abs(cursor)) > OVERFLOW_LIMIT:
            diverged_at = n
            break
        values.append((n * values[n - 1] + cursor) / (n + 1))
        cursor = apply_columns(spec, cursor[:, None])[:, 0]
        n += 1
    return CesaroTrajectory(
        probe=traj.probe,
        norm_tag=traj.norm_tag,
        horizon=len(values),
        values=values,
        power_cursor=cursor,
        diverged_at=diverged_at,
    )


def trajectory(spec: OperatorSpec, probe: np.ndarray, horizon: int) -> CesaroTrajectory:
    """Convenience: start a trajectory and extend it to `horizon`."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    return cesaro_extend(start_trajectory(spec, probe), spec, horizon)


def cesaro_diff(traj: CesaroTrajectory, n: int, m: int) -> float:
    """||A_n x - A_m x|| in the trajectory's ambient norm."""
    for idx in (n, m):
        if not 1 <= idx <= traj.horizon:
            raise ValueError(
                f"index {idx} outside trajectory horizon [1, {traj.horizon}]"
            )
    return vec_norm(traj.values[n - 1] - traj.values[m - 1], traj.norm_tag)


@dataclass(eq=False)
class CesaroMatrixSeq:
    """Dense matrices A_1..A_horizon of an operator, plus divergence flag."""

    norm_tag: str
    horizon: int
    matrices: list
    diverged_at: int | None = None


def cesaro_matrices(spec: OperatorSpec, horizon: int, dense_cap: int = DENSE_CAP) -> CesaroMatrixSeq:
    """Matrix-level Cesaro means A_1..A_horizon via the same recurrence.

    Only available for dim <= `dense_cap`; the power cursor here is the
    dense matrix T^n.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if spec.dim > dense_cap:
        raise CapExceededError(
            f"matrix-mode Cesaro means are capped at dim {dense_cap} (got {spec.dim})"
        )
    t = as_dense(spec)
    mats = [np.eye(spec.dim)]
    cursor = t.copy()
    diverged_at = None
    for n in range(1, horizon):
        if not np.all(np.isfinite(cursor)) or np.max(np.abs(cursor)) > OVERFLOW_LIMIT:
            diverged_at = n
            break
        mats.append((n * mats[n - 1] + cursor) / (n + 1))
        cursor = cursor @ t
    return CesaroMatrixSeq(
        norm_tag=spec.norm_tag,
        horizon=len(mats),
        matrices=mats,
        diverged_at=diverged_at,
    )


class TrajectoryCache:
    """Lazily extended per-probe trajectories for one spec and probe set.

    Trees and certificate search hit the same (probe, horizon) values many
    times; this cache guarantees each probe's trajectory is computed once
    and only ever extended.
    """

    def __init__(self, spec: OperatorSpec, probes):
        self.spec = spec
        self.probes = probes
        self._trajs: dict[int, CesaroTrajectory] = {}

    def get(self, probe_index: int, horizon: int) -> CesaroTrajectory:
        traj = self._trajs.get(probe_index)
        if traj is None:
            traj = start_trajectory(self.spec, self.probes[probe_index])
        if traj.horizon < horizon:
            traj = cesaro_extend(traj, self.spec, horizon)
        self._trajs[probe_index] = traj
        return traj
