#!/usr/bin/env python3
"""Randomized agreement sweep: deep evaluation against the brute-force
per-world oracle on generated programs, with an application-count summary.

    python3 scripts/random_equiv.py --modality feature -n 1000
"""

import argparse
import random
import time

from multiworld.lifting import LiftStats
from multiworld.modal_eval import ModalEnv, eval_modal, eval_shallow_blackbox
from multiworld.oracle import assert_equiv, brute_force_eval, random_bindings, random_program


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modality", choices=("feature", "probability", "interval"),
                    default="feature")
    ap.add_argument("-n", "--count", type=int, default=500)
    ap.add_argument("--seed-base", type=int, default=0)
    ns = ap.parse_args()

    linear = ns.modality == "probability"
    start = time.perf_counter()
    deep_total = shallow_total = 0
    failures = []
    for seed in range(ns.seed_base, ns.seed_base + ns.count):
        rng = random.Random(seed)
        alg, binds = random_bindings(rng, ns.modality)
        program = random_program(rng, alg, binds, linear=linear)
        env = ModalEnv(alg, binds)
        ds, ss = LiftStats(), LiftStats()
        deep = eval_modal(program, env, ds)
        eval_shallow_blackbox(program, env, ss)
        oracle = brute_force_eval(program, binds, alg)
        ok, diff = assert_equiv(alg, deep, oracle)
        if not ok:
            failures.append((seed, diff))
        deep_total += ds.total_applications()
        shallow_total += ss.total_applications()
    elapsed = time.perf_counter() - start

    print(f"{ns.count} {ns.modality} programs in {elapsed:.2f}s")
    print(f"agreement: {ns.count - len(failures)}/{ns.count}")
    print(f"applications: deep={deep_total} black-box={shallow_total} "
          f"(saved {shallow_total - deep_total})")
    for seed, diff in failures[:5]:
        print(f"  seed {seed}: {diff}")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
