#!/usr/bin/env python3
"""Compare the compiled kernel, the Python kernel, and block evaluation."""

import argparse

from dcchain.bench import run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000,
                    help="residual evaluations per backend")
    ap.add_argument("--quick", action="store_true",
                    help="skip the integrator timing")
    args = ap.parse_args()
    for line in run_bench(n_eval=args.n, with_simulate=not args.quick):
        print(line)


if __name__ == "__main__":
    main()
