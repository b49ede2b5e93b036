"""Per-start success rate of the swap search against brute force at small m.

Compares pair swaps alone with pair swaps plus 3-cycle passes.
"""
import argparse
import itertools

import numpy as np

from lpcop.energy import swap_optimize
from lpcop.specfun import RngStream


def brute_force_best(m, beta):
    perms = np.array(list(itertools.permutations(range(m))))
    u = (np.arange(m) + 0.5) / m
    total = np.zeros(len(perms))
    for i, k in itertools.combinations(range(m), 2):
        total += np.hypot(u[i] - u[k], u[perms[:, i]] - u[perms[:, k]]) ** beta
    return 2.0 * total.max() / (m * (m - 1))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[6, 7, 8])
    ap.add_argument("--betas", type=float, nargs="+", default=[0.5, 1.0, 1.5])
    ap.add_argument("--starts", type=int, default=200)
    args = ap.parse_args()
    for m in args.sizes:
        for beta in args.betas:
            best = brute_force_best(m, beta)
            rates = []
            for cycles in (False, True):
                hits = sum(
                    swap_optimize(RngStream(s), m, beta, cycles=cycles).objective >= best * (1 - 1e-12)
                    for s in range(args.starts)
                )
                rates.append(hits / args.starts)
            print(f"m={m} beta={beta:<4g} optimum={best:.6f}  pair swaps: {rates[0]:.2f}  with 3-cycles: {rates[1]:.2f}")


if __name__ == "__main__":
    main()
