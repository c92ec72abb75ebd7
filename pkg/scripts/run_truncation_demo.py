#!/usr/bin/env python3
"""Truncation study for the driven damped oscillator.

Compares the adjoint propagators of successive oscillator truncations on
the smallest retained window, for a generic model (gaps decrease
geometrically) and a window-supported model (gaps vanish identically once
the truncation contains the support).

Usage: run_truncation_demo.py [--cutoffs 4 6 8 10 12] [--T 2.0] [--grid 32]
"""

import argparse

from qsdelim import (
    FieldAmplitudes,
    driven_oscillator_limit,
    truncation_study,
    windowed_oscillator_limit,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cutoffs", type=int, nargs="+",
                        default=[4, 6, 8, 10, 12])
    parser.add_argument("--T", type=float, default=2.0)
    parser.add_argument("--grid", type=int, default=32)
    parser.add_argument("--reference-cutoff", type=int, default=24)
    args = parser.parse_args()

    vac = FieldAmplitudes.vacuum(1)
    generic = driven_oscillator_limit(args.reference_cutoff)
    rep = truncation_study(generic, args.cutoffs, vac, args.T, args.grid)
    print("generic driven oscillator, successive truncation gaps:")
    for c, v in zip(rep.k_schedule, rep.values):
        print(f"  cutoff {int(c)} -> next: gap={v:.6e}")
    print(f"  verdict {'PASS' if rep.verdict else 'FAIL'}")

    window = min(args.cutoffs) + 1
    windowed = windowed_oscillator_limit(args.reference_cutoff, window=window)
    rep_w = truncation_study(windowed, args.cutoffs, vac, args.T, args.grid)
    print(f"window-supported variant (support {window} states):")
    for c, v in zip(rep_w.k_schedule, rep_w.values):
        print(f"  cutoff {int(c)} -> next: gap={v:.6e}")
    print(f"  verdict {'PASS' if rep_w.verdict else 'FAIL'}")
    return 0 if rep.verdict and rep_w.verdict else 1


if __name__ == "__main__":
    raise SystemExit(main())
