"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import timeit
from fractions import Fraction

from liepair import catalog, kernels
from liepair.enveloping import _brackets_table


def normal_form_workload(impl, cad, words):
    br = _brackets_table(cad)

    def run():
        cache = {}
        for k, mono in words:
            impl.left_mul(k, mono, br, cache)
    return run


def rref_workload(impl, mats):
    def run():
        for m, ncols in mats:
            impl.rref_inplace([list(r) for r in m], ncols)
    return run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    cad = catalog.get("sl2-borel").pair().cad
    n = len(cad)
    words = [(rng.randrange(n), tuple(sorted(rng.randrange(n) for _ in range(rng.randint(2, 6)))))
             for _ in range(400)]
    mats = []
    for _ in range(40):
        r, c = rng.randint(6, 14), rng.randint(6, 14)
        mats.append(([[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(c)]
                      for _ in range(r)], c))
    impls = [("python", kernels.python_impl)]
    if kernels.compiled_impl is not None:
        impls.append(("compiled", kernels.compiled_impl))
    else:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':<14}{'backend':<10}{'best of ' + str(args.repeat):>14}")
    base = {}
    for kname, make in (("left_mul", lambda m: normal_form_workload(m, cad, words)),
                        ("rref", lambda m: rref_workload(m, mats))):
        for bname, impl in impls:
            t = min(timeit.repeat(make(impl), number=1, repeat=args.repeat))
            base.setdefault(kname, t)
            print(f"{kname:<14}{bname:<10}{t * 1e3:>11.2f} ms  x{base[kname] / t:.2f}")


if __name__ == "__main__":
    main()
