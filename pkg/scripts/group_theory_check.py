"""Exhaustive finite-group checks behind the bound, plus the quotient realization table."""

import time

from tatebound.galois import group_orders, verify_H_structure, verify_inertia_matrices, verify_submodule_lattice
from tatebound.tate import quotient_structure, realize_quotient


def _show(mask_set):
    return sorted(mask_set)


def main():
    t0 = time.perf_counter()
    lat = verify_submodule_lattice()
    h = verify_H_structure()
    inert = verify_inertia_matrices()
    orders = group_orders()
    secs = time.perf_counter() - t0

    print(f"submodules of M_2(F_2) (4-bit masks): {[len(s) for s in lat.submodules]}  ok={lat.ok}")
    for name, sub in lat.named.items():
        print(f"  {name:<6} {_show(sub)}")
    print(f"  inclusions {lat.inclusions}  V2(1) + V2(2) direct: {lat.direct_sum}")
    print(f"H_1 classes mod 8: {h.h1}  [H_2 : calH] = {h.index_h2}  [H_1 : calH] = {h.index_h1}")
    print(f"  squares generate calH: {h.squares_generate_calH}  det(h^2) = 1 mod 8: {h.det_square_is_one}  ok={h.ok}")
    print(f"inertia span {_show(inert.span)}: meets V2(1) in {_show(inert.meet_v2_1)}, V2(2) in {_show(inert.meet_v2_2)}")
    print(f"|GL_2| enumerated vs formula: {orders}")
    print(f"group suite: {secs:.3f}s")
    print()
    print(" p  n  case       realized       predicted order  dlog  stable")
    t0 = time.perf_counter()
    for p in (2, 3, 5):
        for n in range(1, 5):
            for split in (True, False):
                rq = realize_quotient(p, n, split)
                case = "split" if split else "non-split"
                print(
                    f" {p}  {n}  {case:<9}  {str(rq.invariants):<14} {quotient_structure(p, n, split).order:>15}"
                    f"  {rq.dlog_ok!s:<5} {rq.stable}"
                )
    print(f"quotient table: {time.perf_counter() - t0:.2f}s")
    return 0 if lat.ok and h.ok and inert.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
