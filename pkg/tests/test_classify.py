import numpy as np
import pytest

from ergorank.classify import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    Verdict,
    check_cesaro_bounded,
    check_ergodic,
    check_power_bounded,
    check_uniformly_ergodic,
    replay_witness,
    trusted_horizon,
    _int_bound,
)
from ergorank.operators import (
    KIND_DIAGONAL,
    OperatorSpec,
    basis_probes,
    default_probes,
    gallery,
)


def _probes(name):
    spec = gallery(name)
    return spec, default_probes(spec)


# -- power-bounded -------------------------------------------------------

def test_pb_holds_with_tight_bounds():
    for name, bound in [("identity(8)", 1), ("scalar(0.5)", 1), ("left_shift_l1(64)", 1), ("zero(4)", 1)]:
        spec, probes = _probes(name)
        v = check_power_bounded(spec, probes, 200)
        assert v.status == HOLDS and v.bound == bound, name
        assert v.witness is None


def test_pb_fails_doubling_scalar():
    spec, probes = _probes("scalar(2.0)")
    v = check_power_bounded(spec, probes, 60)
    assert v.status == FAILS
    # first power of 2 above 1000 is 2^10 = 1024
    assert v.witness["power"] == 10
    assert v.witness["value"] == pytest.approx(1024.0)
    val, still = replay_witness(spec, v, probes)
    assert still and val == pytest.approx(v.witness["value"], rel=1e-9)


def test_pb_fails_through_overflow():
    spec, probes = _probes("scalar(2.0)")
    v = check_power_bounded(spec, probes, 5000)
    assert v.status == FAILS
    assert v.evidence["diverged"]
    val, still = replay_witness(spec, v, probes)
    assert still


def test_pb_inconclusive_without_growth():
    # Above the cap but flat: no divergence evidence, never a wrong Fails.
    spec, probes = _probes("identity(8)")
    v = check_power_bounded(spec, probes, 100, bound_cap=0.5)
    assert v.status == INCONCLUSIVE


def test_pb_jordan_witness_is_exact():
    spec, probes = _probes("jordan_1(2)")
    v = check_power_bounded(spec, probes, 10_000)
    assert v.status == FAILS
    # ||T^m e_2||_2 = sqrt(1 + m^2) first exceeds 1000 at m = 1000
    assert v.witness["power"] == 1000
    val, still = replay_witness(spec, v, probes)
    assert still and val == pytest.approx(np.sqrt(1 + 1000.0 ** 2), rel=1e-12)


# -- Cesaro-bounded ------------------------------------------------------

def test_cb_modes_agree_on_jordan():
    spec, probes = _probes("jordan_1(2)")
    dense = check_cesaro_bounded(spec, probes, 10_000, mode="dense")
    probe = check_cesaro_bounded(spec, probes, 10_000, mode="probe")
    assert dense.status == FAILS and probe.status == FAILS
    for v in (dense, probe):
        val, still = replay_witness(spec, v, probes)
        assert still and val == pytest.approx(v.witness["value"], rel=1e-9)


def test_cb_auto_mode_selection():
    spec, probes = _probes("scalar(0.5)")
    v = check_cesaro_bounded(spec, probes, 100, mode="auto")
    assert v.evidence["mode"] == "dense"
    assert v.probe_label is None
    spec, probes = _probes("left_shift_l1(64)")
    v = check_cesaro_bounded(spec, probes, 2000, mode="auto")
    assert v.evidence["mode"] == "probe"
    assert v.probe_label == probes.label


def test_cb_bounds_are_small_integers():
    spec, probes = _probes("zero(4)")
    v = check_cesaro_bounded(spec, probes, 100)
    assert v.status == HOLDS and v.bound == 1
    spec, probes = _probes("scalar(-1.0)")
    v = check_cesaro_bounded(spec, probes, 100)
    assert v.status == HOLDS and v.bound == 1


def test_cb_bound_never_below_pb_range():
    # The means are averages of the powers, so a holds-bound for the powers
    # also bounds the means.
    for name in ["identity(8)", "scalar(0.5)", "left_shift_l1(64)", "rotation(1.0)"]:
        spec, probes = _probes(name)
        pb = check_power_bounded(spec, probes, 300)
        cb = check_cesaro_bounded(spec, probes, 300)
        assert pb.status == HOLDS and cb.status == HOLDS
        assert cb.bound <= pb.bound


def test_cb_mode_validation():
    spec, probes = _probes("identity(8)")
    with pytest.raises(ValueError, match="mode"):
        check_cesaro_bounded(spec, probes, 10, mode="psychic")


# -- ergodic -------------------------------------------------------------

def test_ergodic_holds_on_convergent_examples():
    for name in ["identity(8)", "zero(4)", "scalar(1.0)", "rotation(1.0)"]:
        spec, probes = _probes(name)
        v = check_ergodic(spec, probes, 2000, 1e-2)
        assert v.status == HOLDS, name
        assert max(v.evidence["tail_diameter_ub"]) < 1e-2
        assert max(v.evidence["tail_diameter_lb"]) <= max(v.evidence["tail_diameter_ub"]) + 1e-15


def test_ergodic_tolerance_sensitivity_scalar_half():
    # The geometric-decay scalar needs a horizon matched to the tolerance:
    # the tail diameter at N = 200 sits near 2/100, far above 1e-3.
    spec, probes = _probes("scalar(0.5)")
    assert check_ergodic(spec, probes, 200, 1e-3).status == INCONCLUSIVE
    assert check_ergodic(spec, probes, 200, 5e-2).status == HOLDS
    assert check_ergodic(spec, probes, 20_000, 1e-3).status == HOLDS


def test_ergodic_inherits_cb_failure():
    spec, probes = _probes("scalar(2.0)")
    v = check_ergodic(spec, probes, 2000, 1e-2)
    assert v.status == FAILS
    assert v.witness["inherited_from"] == "cesaro_bounded"
    val, still = replay_witness(spec, v, probes)
    assert still


def test_ergodic_dyadic_fails_without_cb_gate():
    # With a huge cap the boundedness gate stays quiet and the non-decaying
    # dyadic gap must catch the linear drift on its own.
    spec, probes = _probes("jordan_1(2)")
    v = check_ergodic(spec, probes, 2000, 1e-2, bound_cap=1e9)
    assert v.status == FAILS
    assert "scales" in v.witness and v.witness["scales"] == [500, 1000, 2000]
    val, still = replay_witness(spec, v, probes)
    assert still and val == pytest.approx(min(v.witness["gaps"]), rel=1e-9)


def test_ergodic_no_false_fails_on_slow_convergence():
    # Probe-level means of the shift converge like 1/n; slow decay must
    # land in inconclusive or holds, never fails.
    spec, probes = _probes("left_shift_l1(64)")
    for N in (200, 2000):
        v = check_ergodic(spec, probes, N, 1e-3)
        assert v.status in (HOLDS, INCONCLUSIVE)


def test_ergodic_requires_positive_tolerance():
    spec, probes = _probes("identity(8)")
    with pytest.raises(ValueError):
        check_ergodic(spec, probes, 100, 0.0)


# -- uniformly ergodic ---------------------------------------------------

def test_ue_identity_holds_exactly():
    spec = gallery("identity(8)")
    v = check_uniformly_ergodic(spec, 128, 1e-6)
    assert v.status == HOLDS
    assert v.evidence["tail_diameter_ub"] == 0.0


def test_ue_scalar_half_matched_horizons():
    spec = gallery("scalar(0.5)")
    assert check_uniformly_ergodic(spec, 200, 5e-2).status == HOLDS
    assert check_uniformly_ergodic(spec, 200, 1e-3).status == INCONCLUSIVE
    assert check_uniformly_ergodic(spec, 20_000, 1e-3).status == HOLDS


def test_ue_jordan_fails_by_dyadic_gap():
    spec = gallery("jordan_1(2)")
    v = check_uniformly_ergodic(spec, 256, 1e-2)
    assert v.status == FAILS
    assert v.witness["mode"] == "dense"
    val, still = replay_witness(spec, v)
    assert still


def test_ue_scalar_two_fails_by_gate():
    spec = gallery("scalar(2.0)")
    v = check_uniformly_ergodic(spec, 256, 1e-2)
    assert v.status == FAILS
    assert v.witness["inherited_from"] == "cesaro_bounded"
    val, still = replay_witness(spec, v)
    assert still


def test_ue_probe_lower_bound_mode():
    # Above the dense cap only probe diffs are available: holds must be
    # unreachable, and persistent separation still fails.  Late basis
    # vectors keep consecutive means a constant distance apart.
    spec = gallery("left_shift_l1(600)")
    probes = basis_probes(600, "l1", count=256)
    v = check_uniformly_ergodic(spec, 128, 1e-2, probes=probes)
    assert v.status == FAILS
    assert v.witness["mode"] == "probe-lb"
    assert v.witness["gaps"][0] == pytest.approx(1.0)
    val, still = replay_witness(spec, v, probes)
    assert still
    calm = gallery("identity(8)")
    with pytest.raises(ValueError, match="probes"):
        check_uniformly_ergodic(calm, 64, 1e-2, dense_cap=4)


def test_trusted_horizon_shrinks_for_shift_only():
    shift = gallery("left_shift_l1(64)")
    assert trusted_horizon(shift, 256) == 32
    assert trusted_horizon(shift, 10) == 10
    assert trusted_horizon(gallery("identity(8)"), 256) == 256


def test_ue_shift_section_two_regimes():
    spec = gallery("left_shift_l1(64)")
    trusted = check_uniformly_ergodic(spec, trusted_horizon(spec, 256), 1e-2)
    assert trusted.status == FAILS
    section = check_uniformly_ergodic(spec, 256, 1e-2)
    # The 64-dim section is nilpotent beyond its size, so at horizon 256 the
    # persistent-gap evidence is gone, but the tail is still too wide.
    assert section.status == INCONCLUSIVE


# -- verdict plumbing ----------------------------------------------------

def test_verdict_json_shape():
    spec, probes = _probes("scalar(0.5)")
    v = check_ergodic(spec, probes, 500, 1e-2)
    d = v.to_json_dict()
    assert list(d.keys()) == [
        "family", "status", "horizon", "tolerance", "bound", "witness", "probe_label",
    ]
    assert d["family"] == "ergodic"
    assert "evidence" not in d


def test_int_bound_edges():
    assert _int_bound(0.0) == 0
    assert _int_bound(1.0) == 1
    assert _int_bound(1.0 + 5e-10) == 1
    assert _int_bound(1.2) == 2


def test_replay_requires_fails():
    spec, probes = _probes("identity(8)")
    v = check_power_bounded(spec, probes, 50)
    with pytest.raises(ValueError):
        replay_witness(spec, v, probes)


def test_probe_dim_mismatch():
    spec = gallery("identity(8)")
    probes = basis_probes(4, "l2")
    with pytest.raises(ValueError, match="dim"):
        check_power_bounded(spec, probes, 10)
