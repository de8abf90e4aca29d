"""Operator specs, probe sets, and induced norms.

Walks through the four operator kinds, shows that the structured apply
paths agree with dense matrix multiplication, and compares exact induced
norms against the probe-mode lower bound.
"""

import numpy as np

from ergorank.operators import (
    OperatorSpec,
    apply,
    as_dense,
    basis_probes,
    default_probes,
    gallery,
    operator_norm,
)


def main():
    print("== built-in gallery ==")
    for name in ("identity(8)", "left_shift_l1(64)", "jordan_1(2)", "rotation(1.0)"):
        spec = gallery(name)
        print(f"  {name:24s} kind={spec.kind:20s} dim={spec.dim:3d} norm={spec.norm_tag}")

    print("\n== structured apply matches the dense matrix ==")
    rng = np.random.default_rng(11)
    shift = gallery("left_shift_l1(64)")
    x = rng.standard_normal(64)
    direct = apply(shift, x)
    via_dense = as_dense(shift) @ x
    print(f"  left shift: max |structured - dense| = {np.max(np.abs(direct - via_dense)):.3e}")

    print("\n== exact induced norms ==")
    for name, expected in (("identity(8)", 1.0), ("left_shift_l1(64)", 1.0)):
        got = operator_norm(gallery(name)).value
        print(f"  ||T|| for {name:20s} = {got:.6f}   (closed form {expected})")
    diag = OperatorSpec("diagonal", 3, np.array([0.5, -2.0, 1.0]), "linf")
    print(f"  ||T|| for diagonal(0.5,-2,1) in linf = {operator_norm(diag).value:.6f}"
          "   (max |entry| 2)")

    print("\n== probe mode is a certified lower bound ==")
    jordan = gallery("jordan_1(2)")
    exact = operator_norm(jordan)
    probe = operator_norm(jordan, mode="probe", probes=default_probes(jordan))
    print(f"  jordan_1(2): exact {exact.value:.6f} (exact={exact.exact}), "
          f"probe lower bound {probe.value:.6f} (exact={probe.exact})")

    print("\n== probe sets are deterministic and unit-ball ==")
    probes = default_probes(gallery("left_shift_l1(64)"))
    norms = [float(np.abs(probes[i]).sum()) for i in range(len(probes))]
    print(f"  label: {probes.label}")
    print(f"  {len(probes)} probes, ambient norms in [{min(norms):.6f}, {max(norms):.6f}]")
    few = basis_probes(64, "l1", count=4)
    print(f"  basis subset: {few.label}")


if __name__ == "__main__":
    main()
