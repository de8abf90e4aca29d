"""Non-convergence certificates: search, independent checking, tampering.

A certificate fixes eps and an increasing index sequence J, and provides
one unit-ball witness per level whose consecutive means along J stay more
than eps apart.  The checker recomputes every margin from the operator
spec alone, so a certificate is portable evidence.
"""

import numpy as np

from ergorank.certify import (
    NSECertificate,
    check_certificate,
    rank_estimate,
    search_nse,
)
from ergorank.operators import basis_probes, default_probes, gallery
from ergorank.serialization import canonical_dumps, canonical_loads


def main():
    spec = gallery("left_shift_l1(64)")
    probes = basis_probes(64, "l1")

    print("== doubling search on the left shift ==")
    cert = search_nse(spec, probes, epsilon=0.5, target_depth=5, index_bound=32)
    print(f"  depth {cert.depth}, J = {cert.J}")
    for m, (w, row) in enumerate(zip(cert.witnesses, cert.margins), start=1):
        k = int(np.argmax(w))
        margins = ", ".join(f"{v:.6f}" for v in row)
        print(f"  level {m}: witness e_{k}, margins [{margins}]")
    print("  (closed form: ||A_j e_k - A_j' e_k||_1 = 2(1 - j/j') = 1.0 on dyadic pairs)")

    print("\n== the checker recomputes everything ==")
    result = check_certificate(cert)
    print(f"  verdict: accepted={result.accepted} ({result.reason})")

    text = canonical_dumps(cert.to_json_dict())
    reloaded = NSECertificate.from_json_dict(canonical_loads(text))
    print(f"  JSON round trip accepted: {check_certificate(reloaded).accepted}")

    print("\n== tampering is caught ==")
    for label, change in (
        ("raise epsilon to 1.5", {"epsilon": 1.5}),
        ("scale witnesses by 2", {"witnesses": [[2.0 * v for v in w]
                                                for w in cert.to_json_dict()["witnesses"]]}),
        ("reverse J", {"J": list(reversed(cert.to_json_dict()["J"]))}),
    ):
        data = dict(cert.to_json_dict(), **change)
        verdict = check_certificate(NSECertificate.from_json_dict(data))
        print(f"  {label:24s} -> rejected: {verdict.reason}")

    print("\n== beam search finds chains off the dyadic grid ==")
    wide = search_nse(spec, probes, epsilon=1.2, target_depth=2,
                      index_bound=32, strategy="beam")
    print(f"  at eps=1.2 the dyadic pairs split by only 1.0, but beam finds "
          f"J = {wide.J} (depth {wide.depth}, accepted={check_certificate(wide).accepted})")

    print("\n== rank profile: tree height vs separation 1/k ==")
    for name in ("identity(8)", "zero(4)", "left_shift_l1(64)"):
        g = gallery(name)
        est = rank_estimate(g, default_probes(g), ks=(1, 2, 4, 8), depth_cap=6)
        print(f"  {name:20s} heights {est.heights} at eps {est.epsilons}")


if __name__ == "__main__":
    main()
