"""Brute-force reference semantics for small ground instances.

Test harness only.  Everything here is re-derived from the stated
contracts by exhaustive enumeration: candidate arguments are literally all
subsets of the satisfied level-0 instances, filtered for derivation,
minimality, and consistency; priority levels run the written top-down
procedure.  Nothing is shared with the engine beyond the rule-language
and ground-rule data types, so a disagreement points at a real bug.

Deliberately O(2^n) with a hard cap of 12 ground rules.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import max_level, option_heads
from .errors import TooLargeError
from .language import Atom, Compound, DomainLit, Number, PreferLit, Theory, Variable

ORACLE_CAP = 12


@dataclass(frozen=True)
class OracleVerdict:
    acceptable_options: frozenset
    acceptable_prefer_conclusions: tuple  # ((level, frozenset[(stronger, weaker)]), ...)

    def prefer_conclusions(self, level: int) -> frozenset:
        for lvl, conclusions in self.acceptable_prefer_conclusions:
            if lvl == level:
                return conclusions
        return frozenset()


def _unify_term(pattern, ground, binding):
    if isinstance(pattern, Variable):
        seen = binding.get(pattern.name)
        if seen is None:
            binding = dict(binding)
            binding[pattern.name] = ground
            return binding
        return binding if seen == ground else None
    if isinstance(pattern, Atom):
        return binding if isinstance(ground, Atom) and pattern.name == ground.name else None
    if isinstance(pattern, Number):
        return binding if isinstance(ground, Number) and pattern.value == ground.value else None
    if isinstance(pattern, Compound):
        if (
            not isinstance(ground, Compound)
            or pattern.functor != ground.functor
            or len(pattern.args) != len(ground.args)
        ):
            return None
        for p, g in zip(pattern.args, ground.args):
            binding = _unify_term(p, g, binding)
            if binding is None:
                return None
        return binding
    return None


def _unify_literal(pattern, ground, binding):
    if pattern.indicator != ground.indicator:
        return None
    for p, g in zip(pattern.args, ground.args):
        binding = _unify_term(p, g, binding)
        if binding is None:
            return None
    return binding


def _complementary(theory, first, second) -> bool:
    if not (isinstance(first, DomainLit) and isinstance(second, DomainLit)):
        return False
    for a, b in theory.complements:
        for pat_a, pat_b in ((a, b), (b, a)):
            binding = _unify_literal(pat_a, first, {})
            if binding is not None and _unify_literal(pat_b, second, binding) is not None:
                return True
    return False


def _closure(rules) -> set:
    established: set = set()
    remaining = list(rules)
    progress = True
    while progress:
        progress = False
        for rule in list(remaining):
            if all(goal in established for goal in rule.derived_subgoals()):
                remaining.remove(rule)
                established.add(rule.head)
                progress = True
    return established


def _priority_levels(satisfied, theory):
    top = max_level(theory)
    per_level = {}
    for rule in satisfied:
        if isinstance(rule.head, PreferLit):
            per_level.setdefault(rule.level, []).append(rule)
    strict: dict[int, set] = {}
    concluded_per_level = []
    for level in range(top, 0, -1):
        instances = per_level.get(level, [])
        upper = strict.get(level + 1, set())
        acceptable = []
        for rho in instances:
            if level < top:
                beaten = any(
                    sigma.head.stronger == rho.head.weaker
                    and sigma.head.weaker == rho.head.stronger
                    and (sigma.schema_label, rho.schema_label) in upper
                    and (rho.schema_label, sigma.schema_label) not in upper
                    for sigma in instances
                )
                if beaten:
                    continue
            acceptable.append(rho)
        concluded = {(rule.head.stronger, rule.head.weaker) for rule in acceptable}
        strict[level] = {pair for pair in concluded if (pair[1], pair[0]) not in concluded}
        concluded_per_level.append((level, frozenset(concluded)))
    return strict.get(1, set()), tuple(reversed(concluded_per_level))


def brute_force_acceptable(ground, theory: Theory) -> OracleVerdict:
    """Exhaustively enumerated verdict; raises TooLargeError above the cap."""
    ground = tuple(ground)
    if len(ground) > ORACLE_CAP:
        raise TooLargeError(f"{len(ground)} ground rules exceed the oracle cap of {ORACLE_CAP}")
    satisfied = [rule for rule in ground if rule.satisfied]
    strict1, concluded_per_level = _priority_levels(satisfied, theory)

    zero = [rule for rule in satisfied if rule.level == 0 and isinstance(rule.head, DomainLit)]
    n = len(zero)
    subsets = []
    for mask in range(1, 2**n):
        subset = frozenset(zero[i] for i in range(n) if mask & (1 << i))
        subsets.append(subset)
    closure_of = {subset: _closure(subset) for subset in subsets}

    def consistent(subset) -> bool:
        rules = list(subset)
        for i in range(len(rules)):
            for j in range(i + 1, len(rules)):
                if _complementary(theory, rules[i].head, rules[j].head):
                    return False
        return True

    # A subset is a candidate argument for h when it derives h, no
    # single-rule-removal subset still derives h (closure is monotone in the
    # rule set, so this is full minimality), and it is consistent.
    candidates: dict = {}
    for subset in subsets:
        for conclusion in closure_of[subset]:
            if any(
                conclusion in closure_of[subset - {rule}]
                for rule in subset
                if len(subset) > 1
            ):
                continue
            if len(subset) > 1 and conclusion in _closure(frozenset()):
                continue
            if not consistent(subset):
                continue
            tops = [rule for rule in subset if rule.head == conclusion]
            if len(tops) != 1:
                continue
            candidates.setdefault(conclusion, []).append((subset, tops[0]))

    def acceptable(conclusion) -> bool:
        for _, top in candidates.get(conclusion, ()):
            beaten = False
            for rival_conclusion, rival_candidates in candidates.items():
                if not _complementary(theory, rival_conclusion, conclusion):
                    continue
                for _, rival_top in rival_candidates:
                    if (rival_top.schema_label, top.schema_label) in strict1 and (
                        top.schema_label,
                        rival_top.schema_label,
                    ) not in strict1:
                        beaten = True
                        break
                if beaten:
                    break
            if not beaten:
                return True
        return False

    options = option_heads(theory)
    verdict_options = frozenset(
        conclusion.predicate
        for conclusion in candidates
        if conclusion.predicate in options and acceptable(conclusion)
    )
    return OracleVerdict(verdict_options, concluded_per_level)
