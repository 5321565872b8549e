#!/usr/bin/env python3
"""Compare how much work deep and black-box lifting do on one program.

Prints a per-function/per-operator application table for both strategies,
plus tuple generation and pruning counts.  Defaults to the shipped sharing
example, where the constant argument makes the contrast obvious.
"""

import argparse
from pathlib import Path

from multiworld.bindings import load_bindings
from multiworld.lang import parse
from multiworld.lifting import LiftStats
from multiworld.modal_eval import ModalEnv, eval_modal, eval_shallow_blackbox

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-p", "--program", default=str(ROOT / "programs" / "sharing.mdl"))
    ap.add_argument("-b", "--bindings", default=str(ROOT / "programs" / "sharing.mb"))
    ns = ap.parse_args()

    program = parse(Path(ns.program).read_text())
    alg, binds = load_bindings(ns.bindings)

    deep_stats, shallow_stats = LiftStats(), LiftStats()
    eval_modal(program, ModalEnv(alg, binds), deep_stats)
    eval_shallow_blackbox(program, ModalEnv(alg, binds), shallow_stats)

    names = sorted(set(deep_stats.applications) | set(shallow_stats.applications))
    width = max([len("total")] + [len(n) for n in names])
    print(f"{'name':<{width}}  {'deep':>6}  {'black-box':>9}")
    for name in names:
        d = deep_stats.applications.get(name, 0)
        s = shallow_stats.applications.get(name, 0)
        print(f"{name:<{width}}  {d:>6}  {s:>9}")
    print(f"{'total':<{width}}  {deep_stats.total_applications():>6}  "
          f"{shallow_stats.total_applications():>9}")
    print()
    for label, st in (("deep", deep_stats), ("black-box", shallow_stats)):
        print(f"{label}: tuples={st.tuples} pruned={st.pruned} applied={st.applied}")


if __name__ == "__main__":
    main()
