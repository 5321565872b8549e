"""Command-line driver.

    modal run -p program.mdl -b bindings.mb [--mode deep] [--stats]
              [--check-invariants] [--interval-empty reject|swap]
              [--feature-limit N] [--config FA=1,FB=0]

Modes: ``plain`` (one world, needs a configuration when features are
tested), ``shallow`` (black-box cross product), ``deep`` (lifted
interpreter), ``oracle`` (per-world brute force), and ``check`` (deep and
oracle, compared world by world).

Output is deterministic: value pairs one per line as ``value @ label`` in
normalized order, then ``error:KIND @ label`` lines.  Feature labels are
displayed in a minimal sum-of-products form computed from their world sets;
internally labels stay exactly as built.  Exit codes: 0 success (labeled
per-world errors are answers, not failures), 1 usage or parse problems,
2 invariant violations, 3 exceeded budgets.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import lang
from .bindings import load_bindings
from .errors import (
    BudgetExceeded,
    CyclicCallError,
    DisjointnessViolation,
    EmptyModalValue,
    EvalError,
    IntervalJoinMismatch,
    InvariantViolation,
    MissingBinding,
    MissingConfig,
    ModalityMismatch,
    ParseError,
    ProbabilityOverflow,
    ProjectionUnsupported,
    ScopeError,
    TooManyFeatures,
    UndeclaredFeature,
)
from .labels import FNot, FVar, Tag, and_all, or_all
from .lifting import LiftStats
from .modal import project, render_result, validate, value_text
from .modal_eval import ModalEnv, eval_modal, eval_shallow_blackbox
from .oracle import assert_equiv, brute_force_eval

_USAGE_ERRORS = (
    ParseError,
    ScopeError,
    CyclicCallError,
    MissingBinding,
    MissingConfig,
    UndeclaredFeature,
    ModalityMismatch,
    ProjectionUnsupported,
    OSError,
)
_INVARIANT_ERRORS = (
    InvariantViolation,
    DisjointnessViolation,
    EmptyModalValue,
    ProbabilityOverflow,
    IntervalJoinMismatch,
)
_BUDGET_ERRORS = (TooManyFeatures, BudgetExceeded)

_DISPLAY_FEATURE_CAP = 12


@dataclass
class RunConfig:
    program: str
    bindings: str
    mode: str = "deep"
    config: str | None = None
    stats: bool = False
    check_invariants: bool = False
    interval_empty: str = "reject"
    feature_limit: int = 24


# --------------------------------------------------------------------------
# Display form for feature labels: minimal sum of products over the label's
# world set.  Rendering only -- the labels themselves are never rewritten.
# --------------------------------------------------------------------------

def _prime_implicants(minterms):
    current = {(bits, 0) for bits in minterms}
    primes = set()
    while current:
        merged = set()
        nxt = set()
        items = sorted(current)
        for i, (bits_a, dc_a) in enumerate(items):
            for bits_b, dc_b in items[i + 1 :]:
                if dc_a != dc_b:
                    continue
                diff = bits_a ^ bits_b
                if diff and not diff & (diff - 1):  # single differing bit
                    nxt.add((bits_a & ~diff, dc_a | diff))
                    merged.add((bits_a, dc_a))
                    merged.add((bits_b, dc_b))
        primes |= current - merged
        current = nxt
    return primes


def _implicant_expr(bits, dont_care, features):
    lits = []
    for i, name in enumerate(features):
        bit = 1 << i
        if dont_care & bit:
            continue
        lits.append(FVar(name) if bits & bit else FNot(FVar(name)))
    return and_all(lits)


def _minimal_dnf(alg, label):
    features = alg.features
    width = len(features)
    minterms = []
    for mask in range(1 << width):
        config = {name: bool(mask & (1 << i)) for i, name in enumerate(features)}
        if alg.holds(label, config):
            minterms.append(mask)
    if not minterms:
        return "false"
    if len(minterms) == 1 << width:
        return "true"
    primes = _prime_implicants(minterms)

    def coverage(prime):
        bits, dc = prime
        return frozenset(m for m in minterms if m & ~dc == bits)

    cover_of = {p: coverage(p) for p in primes}
    order = sorted(
        primes,
        key=lambda p: (width - bin(p[1]).count("1"),
                       alg.canonical_text(_implicant_expr(*p, features))),
    )
    chosen = []
    uncovered = set(minterms)
    for m in minterms:
        holders = [p for p in order if m in cover_of[p]]
        if len(holders) == 1 and holders[0] not in chosen:
            chosen.append(holders[0])
            uncovered -= cover_of[holders[0]]
    while uncovered:
        best = max(order, key=lambda p: (len(cover_of[p] & uncovered),
                                         p not in chosen))
        chosen.append(best)
        uncovered -= cover_of[best]
    terms = [_implicant_expr(bits, dc, features) for bits, dc in chosen]
    terms.sort(key=alg.canonical_text)
    return alg.canonical_text(or_all(terms))


def display_label(alg):
    """Label-to-text hook for reports; memoized per run."""
    if alg.kind != "feature" or len(alg.features) > _DISPLAY_FEATURE_CAP:
        return alg.canonical_text
    cache: dict = {}

    def fmt(label):
        key = id(label)
        if key not in cache:
            cache[key] = (label, _minimal_dnf(alg, label))  # pin the node
        return cache[key][1]

    return fmt


# --------------------------------------------------------------------------
# Drivers
# --------------------------------------------------------------------------

def _parse_world(alg, text):
    if alg.kind == "interval":
        tag = (text or "").strip().upper()
        if tag not in ("MIN", "MAX"):
            raise MissingConfig("plain interval runs need --config MIN or MAX")
        return Tag.MIN if tag == "MIN" else Tag.MAX
    if alg.kind == "probability":
        raise ProjectionUnsupported(
            "plain mode cannot project probability bindings; use deep or oracle"
        )
    config = {}
    if text:
        for part in text.split(","):
            name, _, raw = part.partition("=")
            name = name.strip()
            raw = raw.strip().lower()
            if raw not in ("0", "1", "true", "false"):
                raise MissingConfig(f"bad configuration entry {part!r}")
            config[name] = raw in ("1", "true")
    missing = set(alg.features) - set(config)
    extra = set(config) - set(alg.features)
    if missing or extra:
        raise MissingConfig(
            f"configuration must assign exactly the declared features "
            f"(missing {sorted(missing)}, unknown {sorted(extra)})"
        )
    return config


def _run_plain(program, alg, bindings, cfg, stats):
    if alg.kind == "probability":
        singles = {}
        for name, mv in bindings.items():
            if len(mv.pairs) != 1:
                raise ProjectionUnsupported(
                    "plain mode needs constant probability bindings"
                )
            singles[name] = mv.pairs[0][0]
        env = singles
        config = None
    else:
        world = _parse_world(alg, cfg.config)
        env = {name: project(alg, mv, world) for name, mv in bindings.items()}
        config = world if alg.kind == "feature" else None
    try:
        out = lang.eval_plain(program, env, config, stats)
        return [value_text(out)]
    except EvalError as ex:
        return [f"error:{ex.kind}"]


def run(cfg: RunConfig):
    """Execute one run; returns (exit_code, stdout lines, stderr lines)."""
    out: list = []
    err: list = []
    with open(cfg.program, "r", encoding="utf-8") as handle:
        program = lang.parse(handle.read())
    alg, bindings = load_bindings(cfg.bindings, feature_limit=cfg.feature_limit)

    if cfg.check_invariants:
        for name, mv in bindings.items():
            report = validate(alg, mv, interval_empty=cfg.interval_empty)
            if not report:
                raise InvariantViolation(
                    f"binding {name!r}: " + "; ".join(report.problems)
                )

    stats = LiftStats()
    env = ModalEnv(
        alg,
        bindings,
        check_invariants=cfg.check_invariants,
        interval_empty=cfg.interval_empty,
    )
    fmt = display_label(alg)

    exit_code = 0
    if cfg.mode == "plain":
        out.extend(_run_plain(program, alg, bindings, cfg, stats))
    elif cfg.mode == "shallow":
        out.extend(render_result(alg, eval_shallow_blackbox(program, env, stats), fmt))
    elif cfg.mode == "deep":
        out.extend(render_result(alg, eval_modal(program, env, stats), fmt))
    elif cfg.mode == "oracle":
        out.extend(render_result(alg, brute_force_eval(program, bindings, alg, stats), fmt))
    elif cfg.mode == "check":
        deep = eval_modal(program, env, stats)
        oracle = brute_force_eval(program, bindings, alg)
        out.extend(render_result(alg, deep, fmt))
        for label, result in (("deep", deep), ("oracle", oracle)):
            report = validate(alg, result, interval_empty=cfg.interval_empty)
            if not report:
                err.append(f"{label} result invalid: " + "; ".join(report.problems))
                exit_code = 2
        ok, diff = assert_equiv(alg, deep, oracle)
        if ok:
            out.append("check: deep == oracle")
        else:
            err.append(f"check failed: {diff}")
            exit_code = 2
    else:
        raise ParseError(f"unknown mode {cfg.mode!r}")

    if cfg.stats:
        stats.sat_calls = getattr(alg, "sat_calls", 0)
        for name in sorted(stats.applications):
            out.append(f"applications.{name}={stats.applications[name]}")
        out.append(f"tuples={stats.tuples}")
        out.append(f"pruned={stats.pruned}")
        out.append(f"sat_calls={stats.sat_calls}")
    return exit_code, out, err


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modal", description="Evaluate programs over many worlds at once.")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="evaluate a program over bindings")
    runp.add_argument("-p", "--program", required=True, help="program file (.mdl)")
    runp.add_argument("-b", "--bindings", required=True, help="bindings file (.mb)")
    runp.add_argument(
        "--mode",
        choices=("plain", "shallow", "deep", "oracle", "check"),
        default="deep",
    )
    runp.add_argument("--config", help="feature assignment FA=1,FB=0 (or MIN/MAX)")
    runp.add_argument("--stats", action="store_true", help="print lifting counters")
    runp.add_argument(
        "--check-invariants",
        action="store_true",
        help="validate every intermediate modal value",
    )
    runp.add_argument("--interval-empty", choices=("reject", "swap"), default="reject")
    runp.add_argument("--feature-limit", type=int, default=24)
    return parser


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig(
            program=ns.program,
            bindings=ns.bindings,
            mode=ns.mode,
            config=ns.config,
            stats=ns.stats,
            check_invariants=ns.check_invariants,
            interval_empty=ns.interval_empty,
            feature_limit=ns.feature_limit,
        )
        code, out, err = run(cfg)
    except _BUDGET_ERRORS as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 3
    except _INVARIANT_ERRORS as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    except _USAGE_ERRORS as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1
    for line in out:
        print(line)
    for line in err:
        print(line, file=sys.stderr)
    return code
