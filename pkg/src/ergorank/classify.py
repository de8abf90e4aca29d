"""Finite-horizon verdicts for four operator families.

Each check scans data up to a horizon and returns a `Verdict` with status
``holds``, ``fails``, or ``inconclusive``.  The error discipline is
one-sided: a ``fails`` verdict always carries a concrete, replayable
witness, while missing evidence degrades to ``inconclusive``, never to a
wrong ``fails``.

Boundedness checks (power-bounded, Cesaro-bounded) look for a uniform bound
k <= bound_cap over the scanned range and treat sustained growth of the
running maximum as divergence evidence.  Convergence checks (ergodic,
uniformly ergodic) certify a small tail diameter over [N/2, N] via the
radius bound diam <= 2 * max_n ||A_n - A_N||, and treat a non-decaying gap
at the three dyadic scales (N/4, N/2, N) as divergence evidence.

For weighted-shift specs, norm-level results describe the finite section
rather than the infinite-dimensional operator once the horizon passes
dim/2; `trusted_horizon` returns the horizon below which the two agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cesaro import OVERFLOW_LIMIT, cesaro_diff, trajectory
from .operators import (
    DENSE_CAP,
    KIND_SHIFT,
    CapExceededError,
    OperatorSpec,
    ProbeSet,
    _l2_norm_power_iteration,
    apply_columns,
    as_dense,
    column_norms,
    matrix_norm,
)

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"

FAMILY_POWER_BOUNDED = "power_bounded"
FAMILY_CESARO_BOUNDED = "cesaro_bounded"
FAMILY_ERGODIC = "ergodic"
FAMILY_UNIFORMLY_ERGODIC = "uniformly_ergodic"

# Divergence heuristics.  Growth of the running max by GROWTH_FACTOR from
# the quarter-horizon checkpoint (strictly increasing past it) flags an
# unbounded family; a gap above GAP_FACTOR * tolerance at all three dyadic
# scales that does not decay by more than DECAY_RATIO flags non-convergence.
GROWTH_FACTOR = 1.5
GAP_FACTOR = 4.0
DECAY_RATIO = 0.75

#: Integer bounds are reported with this slack so float dust cannot bump
#: a true bound of k up to k + 1.
BOUND_SLACK = 1e-9

_ERGODIC_GRID = 65
_UE_GRID = 33

#: Exact l2 matrix norms are computed by SVD up to this dimension; above
#: it, upper bounds use sqrt(l1 * linf) and lower bounds power iteration.
_L2_EXACT_DIM = 32


@dataclass(eq=False)
class Verdict:
    """Outcome of one family check at one horizon.

    `witness` substantiates a ``fails`` status and can be replayed with
    `replay_witness`.  `bound` is the smallest integer bound found for the
    bounded families.  `evidence` holds diagnostic detail (per-probe tail
    diameters, scan maxima) and is not part of the serialized form.
    """

    family: str
    status: str
    horizon: int
    tolerance: float | None
    bound: int | None
    witness: dict | None
    probe_label: str | None
    evidence: dict = field(default_factory=dict, repr=False)

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "status": self.status,
            "horizon": self.horizon,
            "tolerance": self.tolerance,
            "bound": self.bound,
            "witness": self.witness,
            "probe_label": self.probe_label,
        }


def trusted_horizon(spec: OperatorSpec, horizon: int) -> int:
    """Largest horizon at which norm-level verdicts describe the infinite
    operator rather than the finite section (dim/2 for shift specs)."""
    if spec.kind == KIND_SHIFT:
        return min(horizon, max(1, spec.dim // 2))
    return horizon


def _require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


def _int_bound(max_value: float) -> int:
    return max(0, math.ceil(max_value - BOUND_SLACK))


def _capped_norms(X: np.ndarray, norm_tag: str) -> tuple[np.ndarray, bool]:
    """Column norms with non-finite or huge values capped at the overflow
    limit; the flag reports whether capping occurred."""
    with np.errstate(over="ignore", invalid="ignore"):
        norms = column_norms(X, norm_tag)
    bad = ~np.isfinite(norms) | (norms > OVERFLOW_LIMIT)
    if bad.any():
        norms = np.where(bad, OVERFLOW_LIMIT, norms)
        return norms, True
    return norms, False


def _growth_fails(values: np.ndarray, first_step: int, cap: float, diverged: bool) -> bool:
    """Divergence heuristic on a per-step maxima series.

    `values[i]` is the step (first_step + i) maximum.  Requires the overall
    max to exceed `cap` and, unless the scan overflowed outright, the
    running max to grow by GROWTH_FACTOR from the quarter-horizon mark
    while strictly increasing past it.
    """
    if values.size == 0:
        return False
    running = np.maximum.accumulate(values)
    if running[-1] <= cap:
        return False
    if diverged:
        return True
    last_step = first_step + values.size - 1
    q_step = max(first_step, last_step // 4)
    q_pos = q_step - first_step
    if running[-1] < GROWTH_FACTOR * running[q_pos]:
        return False
    window = running[q_pos:]
    return bool(np.all(np.diff(window) > 0))


# -- power-bounded -------------------------------------------------------


def check_power_bounded(
    spec: OperatorSpec,
    probes: ProbeSet,
    horizon: int,
    bound_cap: float = 1e3,
) -> Verdict:
    """Scan ||T^m x|| for all probes and m = 0..horizon."""
    _check_probes(spec, probes)
    _require_positive("horizon", horizon)
    _require_positive("bound_cap", bound_cap)

    Y = probes.vectors.T.copy()
    step_max = np.empty(horizon + 1)
    witness = None
    diverged = False
    steps_done = 0
    for m in range(horizon + 1):
        norms, capped = _capped_norms(Y, spec.norm_tag)
        step_max[m] = norms.max()
        steps_done = m
        if witness is None and step_max[m] > bound_cap:
            probe_idx = int(np.argmax(norms > bound_cap))
            witness = {
                "probe": probe_idx,
                "power": m,
                "value": float(norms[probe_idx]),
                "cap": bound_cap,
            }
        if capped:
            diverged = True
            break
        if m < horizon:
            Y = apply_columns(spec, Y)
    values = step_max[: steps_done + 1]
    overall = float(values.max())
    evidence = {"max": overall, "diverged": diverged, "steps": steps_done}
    if overall <= bound_cap:
        return Verdict(
            FAMILY_POWER_BOUNDED, HOLDS, horizon, None, _int_bound(overall),
            None, probes.label, evidence,
        )
    if _growth_fails(values, 0, bound_cap, diverged):
        return Verdict(
            FAMILY_POWER_BOUNDED, FAILS, horizon, None, None,
            witness, probes.label, evidence,
        )
    return Verdict(
        FAMILY_POWER_BOUNDED, INCONCLUSIVE, horizon, None, None,
        None, probes.label, evidence,
    )


def _check_probes(spec: OperatorSpec, probes: ProbeSet) -> None:
    if probes is None or len(probes) == 0:
        raise ValueError("a non-empty probe set is required")
    if probes.dim != spec.dim:
        raise ValueError(
            f"probe dim {probes.dim} does not match operator dim {spec.dim}"
        )


# -- Cesaro-bounded ------------------------------------------------------


def check_cesaro_bounded(
    spec: OperatorSpec,
    probes: ProbeSet,
    horizon: int,
    bound_cap: float = 1e3,
    mode: str = "auto",
    dense_cap: int = DENSE_CAP,
) -> Verdict:
    """Scan ||A_n x|| over probes (probe mode) or exact ||A_n|| (dense mode)
    for n = 1..horizon.

    Mode ``auto`` picks dense only when it is cheap (dim <= 32 and horizon
    <= 1024); dense mode is exact but materializes matrices.
    """
    _require_positive("horizon", horizon)
    _require_positive("bound_cap", bound_cap)
    if mode == "auto":
        mode = "dense" if (spec.dim <= 32 and horizon <= 1024) else "probe"
    if mode == "probe":
        _check_probes(spec, probes)
        values, per_step_meta, diverged, steps = _mean_probe_maxima(spec, probes, horizon, bound_cap)
        label = probes.label
    elif mode == "dense":
        if spec.dim > dense_cap:
            raise CapExceededError(
                f"dense Cesaro-bounded mode is capped at dim {dense_cap} (got {spec.dim})"
            )
        values, per_step_meta, diverged, steps = _mean_matrix_maxima(spec, horizon, bound_cap)
        label = None
    else:
        raise ValueError(f"unknown mode {mode!r}, expected probe, dense, or auto")

    overall = float(values.max())
    evidence = {"max": overall, "mode": mode, "diverged": diverged, "steps": steps}
    if overall <= bound_cap:
        return Verdict(
            FAMILY_CESARO_BOUNDED, HOLDS, horizon, None, _int_bound(overall),
            None, label, evidence,
        )
    if _growth_fails(values, 1, bound_cap, diverged):
        witness = per_step_meta
        if mode == "dense" and spec.norm_tag == "l2" and spec.dim > _L2_EXACT_DIM:
            # The scan stream used norm upper bounds; confirm the witness
            # value with a lower bound before claiming failure.
            lb = _mat_norm_lb(
                _nth_mean_matrix(as_dense(spec), spec.dim, witness["n"]),
                spec.norm_tag,
                spec.dim,
            )
            if lb <= bound_cap:
                return Verdict(
                    FAMILY_CESARO_BOUNDED, INCONCLUSIVE, horizon, None, None,
                    None, label, evidence,
                )
            witness = dict(witness)
            witness["value"] = lb
        return Verdict(
            FAMILY_CESARO_BOUNDED, FAILS, horizon, None, None,
            witness, label, evidence,
        )
    return Verdict(
        FAMILY_CESARO_BOUNDED, INCONCLUSIVE, horizon, None, None,
        None, label, evidence,
    )


def _mean_probe_maxima(spec, probes, horizon, bound_cap):
    X = probes.vectors.T
    A = X.copy()
    cursor = apply_columns(spec, X)
    step_max = np.empty(horizon)
    witness = None
    diverged = False
    steps = 0
    for n in range(1, horizon + 1):
        norms, _ = _capped_norms(A, spec.norm_tag)
        step_max[n - 1] = norms.max()
        steps = n
        if witness is None and step_max[n - 1] > bound_cap:
            probe_idx = int(np.argmax(norms > bound_cap))
            witness = {
                "mode": "probe",
                "probe": probe_idx,
                "n": n,
                "value": float(norms[probe_idx]),
                "cap": bound_cap,
            }
        if n < horizon:
            cursor_norms, capped = _capped_norms(cursor, spec.norm_tag)
            if capped:
                diverged = True
                break
            A = (n * A + cursor) / (n + 1)
            cursor = apply_columns(spec, cursor)
    return step_max[:steps], witness, diverged, steps


def _mean_matrix_maxima(spec, horizon, bound_cap):
    t = as_dense(spec)
    A = np.eye(spec.dim)
    cursor = t.copy()
    step_max = np.empty(horizon)
    witness = None
    diverged = False
    steps = 0
    for n in range(1, horizon + 1):
        value = _mat_norm_ub(A, spec.norm_tag, spec.dim)
        step_max[n - 1] = value
        steps = n
        if witness is None and value > bound_cap:
            witness = {"mode": "dense", "n": n, "value": value, "cap": bound_cap}
        if n < horizon:
            if not np.all(np.isfinite(cursor)) or np.max(np.abs(cursor)) > OVERFLOW_LIMIT:
                diverged = True
                break
            A = (n * A + cursor) / (n + 1)
            cursor = cursor @ t
    return step_max[:steps], witness, diverged, steps


# -- ergodic -------------------------------------------------------------


def check_ergodic(
    spec: OperatorSpec,
    probes: ProbeSet,
    horizon: int,
    tolerance: float,
    bound_cap: float = 1e3,
) -> Verdict:
    """Probe-level Cauchy check of the means over the tail [N/2, N].

    Requires the Cesaro-bounded check not to fail (its witness is inherited
    on failure); holds only when that check holds and every probe's
    certified tail diameter bound 2 * max_n ||A_n x - A_N x|| is below the
    tolerance.
    """
    _check_probes(spec, probes)
    _require_positive("horizon", horizon)
    _require_positive("tolerance", tolerance)
    cb = check_cesaro_bounded(spec, probes, horizon, bound_cap, mode="probe")
    if cb.status == FAILS:
        witness = {"inherited_from": FAMILY_CESARO_BOUNDED, **(cb.witness or {})}
        return Verdict(
            FAMILY_ERGODIC, FAILS, horizon, tolerance, None,
            witness, probes.label, {"cb_status": cb.status},
        )

    scan = _vector_tail_scan(spec, probes, horizon)
    evidence = {
        "cb_status": cb.status,
        "cb_bound": cb.bound,
        "diverged_at": scan["diverged_at"],
        "tail_radius": scan["tail_radius"],
        "tail_diameter_ub": scan["diam_ub"],
        "tail_diameter_lb": scan["diam_lb"],
        "dyadic_scales": scan["scales"],
    }
    if scan["diverged_at"] is not None:
        return Verdict(
            FAMILY_ERGODIC, INCONCLUSIVE, horizon, tolerance, None,
            None, probes.label, evidence,
        )
    gap_witness = _dyadic_gap_witness(scan["gaps"], scan["scales"], tolerance)
    if gap_witness is not None:
        return Verdict(
            FAMILY_ERGODIC, FAILS, horizon, tolerance, None,
            gap_witness, probes.label, evidence,
        )
    if cb.status == HOLDS and scan["diam_ub"] and max(scan["diam_ub"]) < tolerance:
        return Verdict(
            FAMILY_ERGODIC, HOLDS, horizon, tolerance, None,
            None, probes.label, evidence,
        )
    return Verdict(
        FAMILY_ERGODIC, INCONCLUSIVE, horizon, tolerance, None,
        None, probes.label, evidence,
    )


def _dyadic_scales(horizon: int) -> tuple[int, int, int] | None:
    base = horizon // 4
    if base < 1:
        return None
    return (base, 2 * base, 4 * base)


def _dyadic_gap_witness(gaps, scales, tolerance):
    """First probe whose three dyadic gaps all exceed GAP_FACTOR * tol and
    whose second gap has not decayed below DECAY_RATIO of the first."""
    if gaps is None or scales is None:
        return None
    threshold = GAP_FACTOR * tolerance
    for probe_idx, (g1, g2, g3) in enumerate(gaps):
        if min(g1, g2, g3) > threshold and g2 >= DECAY_RATIO * g1:
            return {
                "probe": probe_idx,
                "scales": list(scales),
                "gaps": [g1, g2, g3],
                "threshold": threshold,
            }
    return None


def _vector_tail_scan(spec, probes, horizon):
    """Two-pass probe scan: final means, dyadic snapshots, tail radii and a
    sampled tail diameter lower bound."""
    X = probes.vectors.T
    n_probes = X.shape[1]
    tail_lo = max(1, horizon // 2)
    grid = _grid_indices(tail_lo, horizon, _ERGODIC_GRID)
    scales = _dyadic_scales(horizon)
    wanted = set(grid) | (set(scales) if scales else set())

    snapshots = {}
    A = X.copy()
    cursor = apply_columns(spec, X)
    diverged_at = None
    reached = 1
    if 1 in wanted:
        snapshots[1] = A.copy()
    for n in range(1, horizon):
        _, capped = _capped_norms(cursor, spec.norm_tag)
        if capped:
            diverged_at = n
            break
        A = (n * A + cursor) / (n + 1)
        cursor = apply_columns(spec, cursor)
        reached = n + 1
        if reached in wanted:
            snapshots[reached] = A.copy()
    if diverged_at is not None:
        return {
            "diverged_at": diverged_at,
            "tail_radius": [],
            "diam_ub": [],
            "diam_lb": [],
            "gaps": None,
            "scales": scales,
        }
    final = A

    # Second pass: exact per-probe max distance to A_N over the whole tail.
    radius = np.zeros(n_probes)
    A = X.copy()
    cursor = apply_columns(spec, X)
    if 1 >= tail_lo:
        radius = np.maximum(radius, column_norms(A - final, spec.norm_tag))
    for n in range(1, horizon):
        A = (n * A + cursor) / (n + 1)
        cursor = apply_columns(spec, cursor)
        if n + 1 >= tail_lo:
            radius = np.maximum(radius, column_norms(A - final, spec.norm_tag))

    diam_lb = np.zeros(n_probes)
    grid_mats = [snapshots[g] for g in grid if g in snapshots]
    for i in range(len(grid_mats)):
        for j in range(i + 1, len(grid_mats)):
            diff = column_norms(grid_mats[i] - grid_mats[j], spec.norm_tag)
            diam_lb = np.maximum(diam_lb, diff)

    gaps = None
    if scales and all(s in snapshots for s in scales):
        a, b, c = (snapshots[s] for s in scales)
        gaps = np.stack(
            [
                column_norms(a - b, spec.norm_tag),
                column_norms(b - c, spec.norm_tag),
                column_norms(a - c, spec.norm_tag),
            ],
            axis=1,
        ).tolist()
    return {
        "diverged_at": None,
        "tail_radius": radius.tolist(),
        "diam_ub": (2.0 * radius).tolist(),
        "diam_lb": diam_lb.tolist(),
        "gaps": gaps,
        "scales": scales,
    }


def _grid_indices(lo: int, hi: int, count: int) -> list[int]:
    if hi <= lo:
        return [hi]
    return [int(v) for v in np.unique(np.linspace(lo, hi, min(count, hi - lo + 1)).astype(int))]


# -- uniformly ergodic ---------------------------------------------------


def check_uniformly_ergodic(
    spec: OperatorSpec,
    horizon: int,
    tolerance: float,
    probes: ProbeSet | None = None,
    bound_cap: float = 1e3,
    dense_cap: int = DENSE_CAP,
) -> Verdict:
    """Norm-level Cauchy check of the means over the tail [N/2, N].

    For dim <= `dense_cap` the matrices A_n are materialized and exact
    operator norms are used; above the cap only probe lower bounds on
    ||A_n - A_m|| are available, so ``holds`` is unreachable there.
    """
    _require_positive("horizon", horizon)
    _require_positive("tolerance", tolerance)
    if spec.dim > dense_cap:
        if probes is None:
            raise ValueError(
                f"dim {spec.dim} exceeds the dense cap {dense_cap}; probes are "
                "required for the lower-bound mode"
            )
        return _ue_probe_lower_bound(spec, probes, horizon, tolerance)
    return _ue_dense(spec, horizon, tolerance, bound_cap)


def _mat_norm_ub(mat, norm_tag, dim):
    if norm_tag != "l2" or dim <= _L2_EXACT_DIM:
        return matrix_norm(mat, norm_tag)
    return math.sqrt(matrix_norm(mat, "l1") * matrix_norm(mat, "linf"))


def _mat_norm_lb(mat, norm_tag, dim):
    if norm_tag != "l2" or dim <= _L2_EXACT_DIM:
        return matrix_norm(mat, norm_tag)
    return _l2_norm_power_iteration(mat)


def _ue_dense(spec, horizon, tolerance, bound_cap):
    t = as_dense(spec)
    d = spec.dim
    tail_lo = max(1, horizon // 2)
    grid = _grid_indices(tail_lo, horizon, _UE_GRID)
    scales = _dyadic_scales(horizon)
    wanted = set(grid) | (set(scales) if scales else set())

    snapshots = {}
    norm_stream = np.empty(horizon)
    A = np.eye(d)
    cursor = t.copy()
    diverged = False
    steps = 0
    gate_witness = None
    for n in range(1, horizon + 1):
        value = _mat_norm_ub(A, spec.norm_tag, d)
        norm_stream[n - 1] = value
        steps = n
        if gate_witness is None and value > bound_cap:
            gate_witness = {"mode": "dense", "n": n, "value": value, "cap": bound_cap}
        if n in wanted:
            snapshots[n] = A.copy()
        if n < horizon:
            if not np.all(np.isfinite(cursor)) or np.max(np.abs(cursor)) > OVERFLOW_LIMIT:
                diverged = True
                break
            A = (n * A + cursor) / (n + 1)
            cursor = cursor @ t

    stream = norm_stream[:steps]
    gate_max = float(stream.max())
    evidence = {"mean_norm_max": gate_max, "diverged": diverged, "mode": "dense"}
    if _growth_fails(stream, 1, bound_cap, diverged):
        # The sustained-growth gate uses upper bounds; confirm the witness
        # value with a lower bound before claiming failure.
        n_w = gate_witness["n"]
        lb = _mat_norm_lb(_nth_mean_matrix(t, d, n_w), spec.norm_tag, d)
        if lb > bound_cap:
            gate_witness["value"] = lb
            witness = {"inherited_from": FAMILY_CESARO_BOUNDED, **gate_witness}
            return Verdict(
                FAMILY_UNIFORMLY_ERGODIC, FAILS, horizon, tolerance, None,
                witness, None, evidence,
            )
    if diverged or steps < horizon:
        return Verdict(
            FAMILY_UNIFORMLY_ERGODIC, INCONCLUSIVE, horizon, tolerance, None,
            None, None, evidence,
        )

    gaps = None
    if scales and all(s in snapshots for s in scales):
        a, b, c = (snapshots[s] for s in scales)
        gaps = [[
            _mat_norm_lb(a - b, spec.norm_tag, d),
            _mat_norm_lb(b - c, spec.norm_tag, d),
            _mat_norm_lb(a - c, spec.norm_tag, d),
        ]]
    gap_witness = _dyadic_gap_witness(gaps, scales, tolerance)
    if gap_witness is not None:
        gap_witness["mode"] = "dense"
        del gap_witness["probe"]
        evidence["dyadic_gaps"] = gaps[0]
        return Verdict(
            FAMILY_UNIFORMLY_ERGODIC, FAILS, horizon, tolerance, None,
            gap_witness, None, evidence,
        )

    final = snapshots[horizon]
    radius = 0.0
    A = np.eye(d)
    cursor = t.copy()
    for n in range(1, horizon + 1):
        if n >= tail_lo:
            radius = max(radius, _mat_norm_ub(A - final, spec.norm_tag, d))
        if n < horizon:
            A = (n * A + cursor) / (n + 1)
            cursor = cursor @ t
    diam_lb = 0.0
    grid_mats = [snapshots[g] for g in grid if g in snapshots]
    if spec.norm_tag != "l2" or d <= _L2_EXACT_DIM:
        for i in range(len(grid_mats)):
            for j in range(i + 1, len(grid_mats)):
                diam_lb = max(
                    diam_lb, matrix_norm(grid_mats[i] - grid_mats[j], spec.norm_tag)
                )
    evidence.update(
        {
            "tail_radius": radius,
            "tail_diameter_ub": 2.0 * radius,
            "tail_diameter_lb": diam_lb,
            "dyadic_gaps": gaps[0] if gaps else None,
        }
    )
    if gate_max <= bound_cap and 2.0 * radius < tolerance:
        return Verdict(
            FAMILY_UNIFORMLY_ERGODIC, HOLDS, horizon, tolerance, None,
            None, None, evidence,
        )
    return Verdict(
        FAMILY_UNIFORMLY_ERGODIC, INCONCLUSIVE, horizon, tolerance, None,
        None, None, evidence,
    )


def _nth_mean_matrix(t: np.ndarray, dim: int, n_target: int) -> np.ndarray:
    A = np.eye(dim)
    cursor = t.copy()
    for n in range(1, n_target):
        A = (n * A + cursor) / (n + 1)
        cursor = cursor @ t
    return A


def _ue_probe_lower_bound(spec, probes, horizon, tolerance):
    _check_probes(spec, probes)
    scan = _vector_tail_scan(spec, probes, horizon)
    evidence = {
        "mode": "probe-lb",
        "diverged_at": scan["diverged_at"],
        "gap_lower_bounds": None,
    }
    if scan["diverged_at"] is not None or scan["gaps"] is None:
        return Verdict(
            FAMILY_UNIFORMLY_ERGODIC, INCONCLUSIVE, horizon, tolerance, None,
            None, probes.label, evidence,
        )
    # Probe diffs are valid lower bounds on the operator-norm gaps.
    gaps_arr = np.asarray(scan["gaps"])
    op_gaps = [gaps_arr[:, 0].max(), gaps_arr[:, 1].max(), gaps_arr[:, 2].max()]
    evidence["gap_lower_bounds"] = [float(g) for g in op_gaps]
    gap_witness = _dyadic_gap_witness([op_gaps], scan["scales"], tolerance)
    if gap_witness is not None:
        gap_witness["mode"] = "probe-lb"
        del gap_witness["probe"]
        gap_witness["gaps"] = [float(g) for g in gap_witness["gaps"]]
        return Verdict(
            FAMILY_UNIFORMLY_ERGODIC, FAILS, horizon, tolerance, None,
            gap_witness, probes.label, evidence,
        )
    return Verdict(
        FAMILY_UNIFORMLY_ERGODIC, INCONCLUSIVE, horizon, tolerance, None,
        None, probes.label, evidence,
    )


# -- witness replay ------------------------------------------------------


def replay_witness(
    spec: OperatorSpec,
    verdict: Verdict,
    probes: ProbeSet | None = None,
) -> tuple[float, bool]:
    """Recompute a ``fails`` witness from scratch.

    Returns the reproduced measurement and whether it still violates the
    verdict's threshold.  The reproduced value matches the recorded one to
    1e-9 (relative) whenever the witness is genuine.
    """
    if verdict.status != FAILS or verdict.witness is None:
        raise ValueError("replay requires a fails verdict with a witness")
    w = dict(verdict.witness)
    family = verdict.family
    if "inherited_from" in w:
        family = w.pop("inherited_from")
    if "probe" in w and probes is None:
        raise ValueError("this witness references a probe; pass the probe set")

    if family == FAMILY_POWER_BOUNDED:
        x = probes[w["probe"]]
        Y = x[:, None]
        for _ in range(w["power"]):
            Y = apply_columns(spec, Y)
            norms, capped = _capped_norms(Y, spec.norm_tag)
            if capped:
                break
        value, _ = _capped_norms(Y, spec.norm_tag)
        value = float(value[0])
        return value, value > w["cap"]

    if family == FAMILY_CESARO_BOUNDED:
        if w["mode"] == "probe":
            x = probes[w["probe"]]
            A = x.copy()
            cursor = apply_columns(spec, x[:, None])[:, 0]
            for n in range(1, w["n"]):
                A = (n * A + cursor) / (n + 1)
                cursor = apply_columns(spec, cursor[:, None])[:, 0]
            value, _ = _capped_norms(A[:, None], spec.norm_tag)
            value = float(value[0])
        else:
            value = _mat_norm_lb(
                _nth_mean_matrix(as_dense(spec), spec.dim, w["n"]), spec.norm_tag, spec.dim
            )
        return value, value > w["cap"]

    if "scales" in w:
        scales = w["scales"]
        mode = w.get("mode")
        if mode == "dense":
            t = as_dense(spec)
            mats = {s: _nth_mean_matrix(t, spec.dim, s) for s in scales}
            g = [
                _mat_norm_lb(mats[scales[0]] - mats[scales[1]], spec.norm_tag, spec.dim),
                _mat_norm_lb(mats[scales[1]] - mats[scales[2]], spec.norm_tag, spec.dim),
                _mat_norm_lb(mats[scales[0]] - mats[scales[2]], spec.norm_tag, spec.dim),
            ]
        elif mode == "probe-lb":
            if probes is None:
                raise ValueError("this witness references probes; pass the probe set")
            g = [0.0, 0.0, 0.0]
            for x in probes.vectors:
                vals = _probe_dyadic_gaps(spec, x, scales)
                g = [max(b, v) for b, v in zip(g, vals)]
        else:
            g = _probe_dyadic_gaps(spec, probes[w["probe"]], scales)
        violates = min(g) > w["threshold"] and g[1] >= DECAY_RATIO * g[0]
        return float(min(g)), violates

    raise ValueError(f"unrecognized witness shape for family {family}: {w}")


def _probe_dyadic_gaps(spec, x, scales):
    traj = trajectory(spec, x, scales[2])
    return [
        cesaro_diff(traj, scales[0], scales[1]),
        cesaro_diff(traj, scales[1], scales[2]),
        cesaro_diff(traj, scales[0], scales[2]),
    ]
