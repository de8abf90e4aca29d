"""Cesaro mean trajectories and the algebraic identities they satisfy.

The running average A_n x = (1/n) sum_{k<n} T^k x is maintained by the
one-step recurrence A_{n+1} x = (n A_n x + T^n x) / (n + 1).  Two exact
identities make good spot checks: the telescoping relation
(n+1) A_{n+1} x - n A_n x = T^n x, and A_n (I - T) x = (x - T^n x) / n.
"""

import numpy as np

from ergorank.cesaro import cesaro_diff, trajectory
from ergorank.operators import apply, as_dense, gallery


def main():
    rng = np.random.default_rng(5)

    print("== recurrence vs direct summation ==")
    spec = gallery("random_diagonalizable(3,6)")
    x = rng.standard_normal(6)
    x /= np.linalg.norm(x)
    traj = trajectory(spec, x, 200)
    mat = as_dense(spec)
    s, power = x.copy(), mat @ x
    worst = 0.0
    for n in range(1, 201):
        worst = max(worst, float(np.linalg.norm(traj.values[n - 1] - s / n)))
        s += power
        power = mat @ power
    print(f"  max deviation over n = 1..200: {worst:.3e}")

    print("\n== telescoping and mean identities ==")
    power = x.copy()
    y = x - mat @ x
    traj_y = trajectory(spec, y, 200)
    tele = mean_id = 0.0
    for n in range(1, 200):
        power = mat @ power if n > 1 else mat @ x
        tele = max(tele, float(np.linalg.norm(
            (n + 1) * traj.values[n] - n * traj.values[n - 1] - power)))
        mean_id = max(mean_id, float(np.linalg.norm(
            traj_y.values[n - 1] - (x - power) / n)))
    print(f"  telescoping residual: {tele:.3e}")
    print(f"  mean identity residual: {mean_id:.3e}")

    print("\n== the alternating scalar averages out ==")
    alt = gallery("scalar(-1.0)")
    t = trajectory(alt, np.array([1.0]), 8)
    means = [float(t.values[n][0]) for n in range(8)]
    print(f"  A_1..A_8 of x=1 under T=-1: {means}")
    print(f"  ||A_1 x - A_2 x|| = {cesaro_diff(t, 1, 2):.3f} (the separated pair)")

    print("\n== divergence is detected, not propagated ==")
    doubling = gallery("scalar(2.0)")
    t = trajectory(doubling, np.array([1.0]), 10_000)
    print(f"  horizon reached: {t.horizon}, diverged_at = {t.diverged_at}")
    print(f"  largest mean kept finite: {float(t.values[t.horizon - 1][0]):.3e}")

    print("\n== nilpotent shift: means decay like (k+1)/n ==")
    shift = gallery("left_shift_l1(64)")
    e9 = np.zeros(64)
    e9[9] = 1.0
    t = trajectory(shift, e9, 64)
    for n in (5, 10, 20, 40):
        got = float(np.abs(t.values[n - 1]).sum())
        print(f"  ||A_{n:2d} e_9||_1 = {got:.6f}   (min(n,10)/n = {min(n, 10) / n:.6f})")
    assert np.allclose(apply(shift, e9), np.eye(64)[8])


if __name__ == "__main__":
    main()
