"""Label algebras: how sets of worlds intersect, union, and empty out.

A label annotates one variant inside a modal value and denotes the set of
worlds where that variant holds.  Three interchangeable algebras cover the
three supported modalities:

* ``FeatureAlgebra`` -- labels are propositional formulas over a declared,
  ordered set of feature names; a world is a total true/false configuration
  of those features.  Emptiness is propositional unsatisfiability, decided
  by a small DPLL kernel over a Tseitin-style clausal form, memoized per
  algebra instance.
* ``ProbabilityAlgebra`` -- labels are weights in [0, 1].  Worlds are
  quantified rather than named; combining weights assumes independence
  (intersection multiplies, union of disjoint sets adds).
* ``IntervalAlgebra`` -- labels are the two endpoint tags MIN and MAX.
  The EMPTY tag only arises as the meet of mismatched tags; it never
  appears inside a valid modal value.

Labels are immutable once built and are never simplified: merging modal
pairs keys on values, not on label shape, so label equality is not needed.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .errors import (
    IntervalJoinMismatch,
    ProbabilityOverflow,
    TooManyFeatures,
    UndeclaredFeature,
)


# --------------------------------------------------------------------------
# Feature expressions
# --------------------------------------------------------------------------

class FeatureExpr:
    """A propositional formula over declared feature names."""


@dataclass(frozen=True)
class FTrue(FeatureExpr):
    pass


@dataclass(frozen=True)
class FFalse(FeatureExpr):
    pass


@dataclass(frozen=True)
class FVar(FeatureExpr):
    name: str


@dataclass(frozen=True)
class FNot(FeatureExpr):
    arg: FeatureExpr


@dataclass(frozen=True)
class FAnd(FeatureExpr):
    lhs: FeatureExpr
    rhs: FeatureExpr


@dataclass(frozen=True)
class FOr(FeatureExpr):
    lhs: FeatureExpr
    rhs: FeatureExpr


TRUE = FTrue()
FALSE = FFalse()


def feature_text(expr: FeatureExpr) -> str:
    """Deterministic, fully parenthesized rendering: ``!``, ``&``, ``|``."""
    if isinstance(expr, FTrue):
        return "true"
    if isinstance(expr, FFalse):
        return "false"
    if isinstance(expr, FVar):
        return expr.name
    if isinstance(expr, FNot):
        return "!" + feature_text(expr.arg)
    if isinstance(expr, FAnd):
        return f"({feature_text(expr.lhs)} & {feature_text(expr.rhs)})"
    if isinstance(expr, FOr):
        return f"({feature_text(expr.lhs)} | {feature_text(expr.rhs)})"
    raise TypeError(f"not a feature expression: {expr!r}")


def satisfies(expr: FeatureExpr, config) -> bool:
    """Evaluate a formula under a total feature-to-bool configuration."""
    if isinstance(expr, FTrue):
        return True
    if isinstance(expr, FFalse):
        return False
    if isinstance(expr, FVar):
        return bool(config[expr.name])
    if isinstance(expr, FNot):
        return not satisfies(expr.arg, config)
    if isinstance(expr, FAnd):
        return satisfies(expr.lhs, config) and satisfies(expr.rhs, config)
    if isinstance(expr, FOr):
        return satisfies(expr.lhs, config) or satisfies(expr.rhs, config)
    raise TypeError(f"not a feature expression: {expr!r}")


def feature_names(expr: FeatureExpr) -> set:
    """All feature names referenced by a formula."""
    if isinstance(expr, FVar):
        return {expr.name}
    if isinstance(expr, FNot):
        return feature_names(expr.arg)
    if isinstance(expr, (FAnd, FOr)):
        return feature_names(expr.lhs) | feature_names(expr.rhs)
    return set()


def and_all(exprs) -> FeatureExpr:
    """Left fold of conjunction; empty input means the full world set."""
    out = None
    for e in exprs:
        out = e if out is None else FAnd(out, e)
    return TRUE if out is None else out


def or_all(exprs) -> FeatureExpr:
    """Left fold of disjunction; empty input means the empty world set."""
    out = None
    for e in exprs:
        out = e if out is None else FOr(out, e)
    return FALSE if out is None else out


# --------------------------------------------------------------------------
# Satisfiability kernel
# --------------------------------------------------------------------------

def _clauses(expr: FeatureExpr, var_ids) -> list:
    """Tseitin-style clausal form; the root literal is asserted as a unit.

    Feature variables keep their declared ids (1..k); auxiliary variables
    for the internal and/or nodes come after, so the DPLL branch heuristic
    (smallest variable first) decides features before auxiliaries.  Shared
    subformulas are translated once (labels built by repeated meets form
    DAGs whose tree expansion can be exponential).
    """
    clauses: list = []
    fresh = itertools.count(len(var_ids) + 1)
    memo: dict = {}

    def lit(e) -> int:
        known = memo.get(id(e))
        if known is not None:
            return known
        if isinstance(e, FTrue):
            t = next(fresh)
            clauses.append([t])
        elif isinstance(e, FFalse):
            t = next(fresh)
            clauses.append([-t])
        elif isinstance(e, FVar):
            t = var_ids[e.name]
        elif isinstance(e, FNot):
            t = -lit(e.arg)
        else:
            a = lit(e.lhs)
            b = lit(e.rhs)
            t = next(fresh)
            if isinstance(e, FAnd):
                clauses.extend([[-t, a], [-t, b], [t, -a, -b]])
            else:
                clauses.extend([[-t, a, b], [t, -a], [t, -b]])
        memo[id(e)] = t
        return t

    root = lit(expr)
    clauses.append([root])
    return clauses


def _assign(clauses, literal):
    out = []
    for c in clauses:
        if literal in c:
            continue
        if -literal in c:
            c = [x for x in c if x != -literal]
        out.append(c)
    return out


def _dpll(clauses) -> bool:
    """DPLL with unit propagation and pure-literal elimination."""

    def solve(cls):
        while True:
            if not cls:
                return True
            if any(not c for c in cls):
                return False
            unit = next((c[0] for c in cls if len(c) == 1), None)
            if unit is not None:
                cls = _assign(cls, unit)
                continue
            lits = {l for c in cls for l in c}
            pure = next(
                (l for l in sorted(lits, key=lambda x: (abs(x), x)) if -l not in lits),
                None,
            )
            if pure is not None:
                cls = _assign(cls, pure)
                continue
            branch = min(abs(l) for l in lits)
            return solve(_assign(cls, branch)) or solve(_assign(cls, -branch))

    return solve(clauses)


# --------------------------------------------------------------------------
# The three algebras
# --------------------------------------------------------------------------

class FeatureAlgebra:
    """Labels are formulas over a fixed, ordered set of feature names."""

    kind = "feature"

    def __init__(self, features, feature_limit: int = 24):
        features = tuple(features)
        if len(set(features)) != len(features):
            raise ValueError(f"duplicate feature names: {features}")
        if len(features) > feature_limit:
            raise TooManyFeatures(
                f"{len(features)} features declared, limit is {feature_limit}"
            )
        self.features = features
        self._ids = {name: i + 1 for i, name in enumerate(features)}
        # caches key on object identity: deep evaluation shares subformulas
        # heavily, and rendering a shared label to text can be exponential
        self._sat_cache: dict = {}
        self._holds_memo: dict = {}
        self._keep: dict = {}
        self.sat_calls = 0

    def var(self, name: str) -> FVar:
        if name not in self._ids:
            known = ", ".join(self.features) or "none"
            raise UndeclaredFeature(f"feature {name!r} not declared (declared: {known})")
        return FVar(name)

    @property
    def top(self) -> FeatureExpr:
        return TRUE

    def top_labels(self) -> tuple:
        return (TRUE,)

    def meet(self, l1, l2):
        # constant folding only; composite labels are kept as built
        if isinstance(l1, FTrue):
            return l2
        if isinstance(l2, FTrue):
            return l1
        if isinstance(l1, FFalse) or isinstance(l2, FFalse):
            return FALSE
        return FAnd(l1, l2)

    def join(self, l1, l2):
        if isinstance(l1, FFalse):
            return l2
        if isinstance(l2, FFalse):
            return l1
        if isinstance(l1, FTrue) or isinstance(l2, FTrue):
            return TRUE
        return FOr(l1, l2)

    def is_empty(self, label) -> bool:
        return not self.sat_check(label)

    def sat_check(self, expr: FeatureExpr) -> bool:
        """True iff some configuration satisfies the formula (memoized)."""
        self.sat_calls += 1
        key = id(expr)
        hit = self._sat_cache.get(key)
        if hit is not None:
            return hit
        result = _dpll(_clauses(expr, self._ids))
        self._sat_cache[key] = result
        self._keep[key] = expr  # pin the node so its id stays valid
        return result

    def check_disjoint(self, labels_) -> bool:
        return all(
            self.is_empty(self.meet(a, b))
            for a, b in itertools.combinations(list(labels_), 2)
        )

    def check_total(self, labels_) -> bool:
        return self.is_empty(FNot(or_all(labels_)))

    def holds(self, label, config) -> bool:
        """Like ``satisfies`` but memoized over shared subformulas."""
        ckey = tuple(bool(config[name]) for name in self.features)
        memo = self._holds_memo

        def go(e) -> bool:
            key = (id(e), ckey)
            hit = memo.get(key)
            if hit is not None:
                return hit
            if isinstance(e, FTrue):
                result = True
            elif isinstance(e, FFalse):
                result = False
            elif isinstance(e, FVar):
                result = bool(config[e.name])
            elif isinstance(e, FNot):
                result = not go(e.arg)
            elif isinstance(e, FAnd):
                result = go(e.lhs) and go(e.rhs)
            else:
                result = go(e.lhs) or go(e.rhs)
            memo[key] = result
            self._keep[id(e)] = e
            return result

        return go(label)

    def canonical_text(self, label) -> str:
        return feature_text(label)

    def equivalent(self, a, b) -> bool:
        """Denotational equality of two labels."""
        return self.is_empty(self.meet(a, FNot(b))) and self.is_empty(
            self.meet(b, FNot(a))
        )

    def iter_configs(self):
        """All 2^k configurations, last declared feature varying fastest."""
        for bits in itertools.product((False, True), repeat=len(self.features)):
            yield dict(zip(self.features, bits))

    def minterm(self, config) -> FeatureExpr:
        """The conjunction of literals pinning exactly one configuration."""
        lits = [
            FVar(name) if config[name] else FNot(FVar(name))
            for name in self.features
        ]
        return and_all(lits)


class ProbabilityAlgebra:
    """Labels are weights in [0, 1]; combination assumes independence."""

    kind = "probability"
    empty_eps = 1e-12
    tol = 1e-9

    def top_labels(self) -> tuple:
        return (1.0,)

    @property
    def top(self) -> float:
        return 1.0

    def meet(self, l1: float, l2: float) -> float:
        return l1 * l2

    def join(self, l1: float, l2: float) -> float:
        s = l1 + l2
        if s > 1.0 + self.tol:
            raise ProbabilityOverflow(f"joined weights sum to {s!r} > 1.0")
        return min(s, 1.0)

    def is_empty(self, label: float) -> bool:
        return label < self.empty_eps

    def check_disjoint(self, labels_) -> bool:
        return sum(labels_) <= 1.0 + self.tol

    def check_total(self, labels_) -> bool:
        return abs(sum(labels_) - 1.0) <= self.tol

    def canonical_text(self, label: float) -> str:
        return f"{label:.9f}"


class Tag(enum.Enum):
    MIN = "MIN"
    MAX = "MAX"
    EMPTY = "EMPTY"


class IntervalAlgebra:
    """Labels are the MIN/MAX endpoint tags of a range."""

    kind = "interval"

    def top_labels(self) -> tuple:
        # no single label covers both endpoint worlds
        return (Tag.MIN, Tag.MAX)

    def meet(self, l1: Tag, l2: Tag) -> Tag:
        return l1 if l1 is l2 else Tag.EMPTY

    def join(self, l1: Tag, l2: Tag) -> Tag:
        if l1 is l2:
            return l1
        if l1 is Tag.EMPTY:
            return l2
        if l2 is Tag.EMPTY:
            return l1
        raise IntervalJoinMismatch(f"cannot join {l1.value} with {l2.value}")

    def is_empty(self, label: Tag) -> bool:
        return label is Tag.EMPTY

    def _one_of_each(self, labels_) -> bool:
        tags = list(labels_)
        return (
            len(tags) == 2
            and tags.count(Tag.MIN) == 1
            and tags.count(Tag.MAX) == 1
        )

    def check_disjoint(self, labels_) -> bool:
        return self._one_of_each(labels_)

    def check_total(self, labels_) -> bool:
        return self._one_of_each(labels_)

    def canonical_text(self, label: Tag) -> str:
        return label.value


def algebra_for(kind: str, features=(), feature_limit: int = 24):
    """Construct the algebra named by a modality kind string."""
    if kind == "feature":
        return FeatureAlgebra(features, feature_limit=feature_limit)
    if kind == "probability":
        return ProbabilityAlgebra()
    if kind == "interval":
        return IntervalAlgebra()
    raise ValueError(f"unknown modality {kind!r}")
