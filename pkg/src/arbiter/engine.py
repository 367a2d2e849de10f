"""Argument construction, dynamic priorities, and option acceptance.

The semantics is stratified and credulous:

* Arguments are minimal, internally consistent derivation trees built from
  satisfied ground rules; leaves are context facts or assumed hypotheses.
* Priorities resolve top-down.  At the highest level every satisfied
  priority instance is acceptable.  One level down, an instance loses only
  to a conflicting instance the level above ranks strictly higher.  The
  strict relation at each level keeps a pair (a > b) only when some
  acceptable instance concludes prefer(a,b) and none concludes prefer(b,a),
  so it is antisymmetric by construction and opposing unresolved priorities
  cancel.
* An option argument is acceptable unless a conflicting argument's rule
  sits strictly above its own rule in the level-1 relation.  When neither
  side wins, both survive, and complementary survivors mark the result
  ambiguous.

Priorities relate rule schemas: a strict pair between two schemas covers
every pair of their instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from .analysis import max_level, option_heads
from .errors import UnknownOptionError
from .explain import DefeatRecord, Explanation
from .grounding import (
    GroundRule,
    QueryContext,
    abducible_vocabulary,
    ground_theory,
    match_literal,
)
from .language import DomainLit, PreferLit, Theory


@dataclass(frozen=True)
class Argument:
    """A minimal ground derivation for one conclusion."""

    conclusion: object
    derivation: frozenset  # GroundRules forming the derivation tree
    top: GroundRule  # the rule concluding `conclusion`
    assumptions: frozenset = frozenset()  # abducible leaves assumed
    support_priorities: frozenset = frozenset()  # instance ids backing its strength


@dataclass(frozen=True)
class LevelPriorities:
    accepted: tuple  # acceptable prefer instances at this level
    strict: frozenset  # ordered (stronger_label, weaker_label) pairs


@dataclass(frozen=True)
class PriorityRelation:
    levels: tuple  # ((level, LevelPriorities), ...)

    def at(self, level: int) -> LevelPriorities:
        for lvl, entry in self.levels:
            if lvl == level:
                return entry
        return LevelPriorities((), frozenset())

    def strictly_above(self, stronger: str, weaker: str, level: int = 1) -> bool:
        return (stronger, weaker) in self.at(level).strict


@dataclass(frozen=True)
class DecisionResult:
    acceptable_options: tuple
    per_option: dict  # option id -> tuple of Explanation
    ambiguous: bool
    arguments: tuple = ()  # the acceptable option arguments
    priorities: PriorityRelation = PriorityRelation(())

    @property
    def assumptions_used(self) -> frozenset:
        used = frozenset()
        for explanations in self.per_option.values():
            for expl in explanations:
                used |= frozenset(expl.assumptions)
        return used


def complementary_literals(theory: Theory, first, second) -> bool:
    """Declared complements (unifying consistently) for domain conclusions."""
    if not (isinstance(first, DomainLit) and isinstance(second, DomainLit)):
        return False
    for a, b in theory.complements:
        for pattern_a, pattern_b in ((a, b), (b, a)):
            binding = match_literal(pattern_a, first, {})
            if binding is None:
                continue
            if match_literal(pattern_b, second, binding) is not None:
                return True
    return False


def conflicts(a: Argument, b: Argument, theory: Theory) -> bool:
    """Do the two arguments attack one another?

    Domain conclusions conflict when declared complementary; priority
    conclusions conflict when they prefer the same rules in opposite
    directions.
    """
    ca, cb = a.conclusion, b.conclusion
    if isinstance(ca, PreferLit) and isinstance(cb, PreferLit):
        return ca.stronger == cb.weaker and ca.weaker == cb.stronger
    return complementary_literals(theory, ca, cb)


# ---------------------------------------------------------------------------
# Argument construction


def _minimal_sets(sets):
    unique = sorted(set(sets), key=lambda s: (len(s), sorted(r.instance_id for r in s)))
    minimal = []
    for candidate in unique:
        if not any(kept < candidate for kept in minimal):
            minimal.append(candidate)
    return tuple(minimal)


def _consistent(theory: Theory, rules) -> bool:
    heads = [rule.head for rule in rules]
    for x, y in itertools.combinations(heads, 2):
        if complementary_literals(theory, x, y):
            return False
    return True


class _Derivations:
    """Enumerates minimal derivation-rule sets per conclusion, cycle-safe."""

    def __init__(self, satisfied, theory):
        self.theory = theory
        self.by_head: dict = {}
        for rule in sorted(satisfied, key=lambda r: r.instance_id):
            self.by_head.setdefault(rule.head, []).append(rule)

    def for_conclusion(self, conclusion, stack=frozenset()):
        if conclusion in stack:
            return ()
        collected = []
        for rule in self.by_head.get(conclusion, ()):
            alternatives = [(frozenset((rule,)),)]
            feasible = True
            for goal in rule.derived_subgoals():
                subs = self.for_conclusion(goal, stack | {conclusion})
                if not subs:
                    feasible = False
                    break
                alternatives.append(subs)
            if not feasible:
                continue
            for combo in itertools.product(*alternatives):
                collected.append(frozenset().union(*combo))
        return _minimal_sets(collected)


def build_arguments(ground, theory: Theory) -> tuple:
    """All minimal consistent arguments for derivable conclusions.

    Covers level-0 domain conclusions and prefer conclusions at every level;
    only fully satisfied instances participate (rules waiting on open
    assumptions support nothing until the assumption is actually made).
    """
    satisfied = [rule for rule in ground if rule.satisfied]
    derivations = _Derivations(satisfied, theory)
    arguments = []
    for conclusion in sorted(derivations.by_head, key=str):
        for rule_set in derivations.for_conclusion(conclusion):
            if not _consistent(theory, rule_set):
                continue
            tops = [rule for rule in rule_set if rule.head == conclusion]
            top = min(tops, key=lambda r: r.instance_id)
            assumptions = frozenset()
            for rule in rule_set:
                assumptions |= rule.assumed_leaves
            arguments.append(
                Argument(
                    conclusion=conclusion,
                    derivation=rule_set,
                    top=top,
                    assumptions=assumptions,
                )
            )
    return tuple(arguments)


# ---------------------------------------------------------------------------
# Priorities


def strict_priorities(ground, theory: Theory) -> PriorityRelation:
    """Level-by-level acceptance of priority instances, from the top down."""
    top_level = max_level(theory)
    by_level: dict[int, list[GroundRule]] = {}
    for rule in ground:
        if rule.satisfied and isinstance(rule.head, PreferLit):
            by_level.setdefault(rule.level, []).append(rule)
    levels = []
    strict_above: frozenset = frozenset()
    for level in range(top_level, 0, -1):
        instances = sorted(by_level.get(level, ()), key=lambda r: r.instance_id)
        accepted = []
        for candidate in instances:
            beaten = False
            if level < top_level:
                for rival in instances:
                    if (
                        rival.head.stronger == candidate.head.weaker
                        and rival.head.weaker == candidate.head.stronger
                        and (rival.schema_label, candidate.schema_label) in strict_above
                        and (candidate.schema_label, rival.schema_label) not in strict_above
                    ):
                        beaten = True
                        break
            if not beaten:
                accepted.append(candidate)
        concluded = {(rule.head.stronger, rule.head.weaker) for rule in accepted}
        strict = frozenset(pair for pair in concluded if (pair[1], pair[0]) not in concluded)
        levels.append((level, LevelPriorities(tuple(accepted), strict)))
        strict_above = strict
    return PriorityRelation(tuple(reversed(levels)))


def _defeat_chain(a_label, b_label, priorities, ground):
    """Priority instances explaining why rule `a_label` beats rule `b_label`.

    The first link concludes prefer(a,b); whenever the defeated side had a
    satisfied opposite instance, the next link is the higher-level instance
    that put it down.
    """
    satisfied_by_level: dict[int, list[GroundRule]] = {}
    for rule in ground:
        if rule.satisfied and isinstance(rule.head, PreferLit):
            satisfied_by_level.setdefault(rule.level, []).append(rule)
    chain = []
    level, stronger, weaker = 1, a_label, b_label
    while True:
        accepted = [
            rule
            for rule in priorities.at(level).accepted
            if rule.head == PreferLit(stronger, weaker)
        ]
        if not accepted:
            break
        link = min(accepted, key=lambda r: r.instance_id)
        chain.append(link)
        opposites = sorted(
            (
                rule
                for rule in satisfied_by_level.get(level, ())
                if rule.head == PreferLit(weaker, stronger)
            ),
            key=lambda r: r.instance_id,
        )
        if not opposites:
            break
        upset = opposites[0]
        upper = priorities.at(level + 1).strict
        same_side = sorted(
            {
                rule.schema_label
                for rule in satisfied_by_level.get(level, ())
                if rule.head == PreferLit(stronger, weaker)
            }
        )
        defeater = next(
            (schema for schema in same_side if (schema, upset.schema_label) in upper),
            None,
        )
        if defeater is None:
            break
        level, stronger, weaker = level + 1, defeater, upset.schema_label
    return tuple(chain)


# ---------------------------------------------------------------------------
# Acceptance


def _belief_support(rule: GroundRule, derivations: _Derivations):
    """A deterministic derivation-rule set for each derived subgoal of a rule."""
    support = []
    for goal in rule.derived_subgoals():
        candidates = derivations.for_conclusion(goal)
        if candidates:
            support.extend(sorted(candidates[0], key=lambda r: r.instance_id))
    return support


def _ordered_derivation(argument: Argument) -> tuple:
    rest = sorted(
        (rule for rule in argument.derivation if rule is not argument.top),
        key=lambda r: r.instance_id,
    )
    return (argument.top, *rest)


def _build_explanation(argument, records, option_id, derivations) -> Explanation:
    decision_rules = _ordered_derivation(argument)
    priority_rules: list[GroundRule] = []
    defeated = []
    for competing_option, competing_label, chain in records:
        for link in chain:
            if link not in priority_rules:
                priority_rules.append(link)
            for belief_rule in _belief_support(link, derivations):
                if belief_rule not in priority_rules:
                    priority_rules.append(belief_rule)
        defeated.append(
            DefeatRecord(
                option=competing_option,
                rule=competing_label,
                chain=tuple(link.instance_id for link in chain),
            )
        )
    facts = set()
    assumptions = set()
    for rule in (*decision_rules, *priority_rules):
        facts |= rule.context_facts()
        assumptions |= rule.assumed_leaves
    return Explanation(
        option=option_id,
        conclusion=argument.conclusion,
        decision_rules=decision_rules,
        priority_rules=tuple(priority_rules),
        facts_used=tuple(sorted(facts, key=str)),
        assumptions=tuple(sorted(assumptions, key=str)),
        defeated=tuple(defeated),
    )


def acceptable_options(ground, theory: Theory) -> DecisionResult:
    """Which options survive, with one explanation per acceptable argument."""
    arguments = build_arguments(ground, theory)
    priorities = strict_priorities(ground, theory)
    strict1 = priorities.at(1).strict
    options = option_heads(theory)

    domain_args = [arg for arg in arguments if isinstance(arg.conclusion, DomainLit)]
    conclusions = sorted({arg.conclusion for arg in domain_args}, key=str)
    rivals_of = {
        conclusion: tuple(
            other
            for other in conclusions
            if other != conclusion and complementary_literals(theory, conclusion, other)
        )
        for conclusion in conclusions
    }
    args_by_conclusion: dict = {}
    for arg in domain_args:
        args_by_conclusion.setdefault(arg.conclusion, []).append(arg)

    derivations = _Derivations([r for r in ground if r.satisfied], theory)
    chain_cache: dict = {}

    def chain_for(a_label, b_label):
        key = (a_label, b_label)
        if key not in chain_cache:
            chain_cache[key] = _defeat_chain(a_label, b_label, priorities, ground)
        return chain_cache[key]

    accepted_args = []
    per_option: dict[str, list[Explanation]] = {}
    acceptable_conclusions = set()
    for conclusion in conclusions:
        attackers = [
            attacker
            for rival in rivals_of[conclusion]
            for attacker in args_by_conclusion[rival]
        ]
        for argument in args_by_conclusion[conclusion]:
            own = argument.top.schema_label
            if any(
                (attacker.top.schema_label, own) in strict1
                and (own, attacker.top.schema_label) not in strict1
                for attacker in attackers
            ):
                continue
            acceptable_conclusions.add(conclusion)
            option_id = conclusion.predicate if conclusion.predicate in options else None
            records = []
            seen_rivals = set()
            for attacker in attackers:
                rival_key = (str(attacker.conclusion), attacker.top.schema_label)
                if rival_key in seen_rivals:
                    continue
                seen_rivals.add(rival_key)
                rival_option = (
                    attacker.conclusion.predicate
                    if attacker.conclusion.predicate in options
                    else str(attacker.conclusion)
                )
                if (own, attacker.top.schema_label) in strict1:
                    chain = chain_for(own, attacker.top.schema_label)
                else:
                    chain = ()
                records.append((rival_option, attacker.top.schema_label, chain))
            if option_id is None:
                continue
            explanation = _build_explanation(argument, records, option_id, derivations)
            supported = replace(
                argument,
                support_priorities=frozenset(
                    iid for record in explanation.defeated for iid in record.chain
                ),
            )
            accepted_args.append(supported)
            per_option.setdefault(option_id, []).append(explanation)

    acceptable = tuple(sorted(per_option))
    ambiguous = any(
        complementary_literals(theory, first, second)
        for first, second in itertools.combinations(sorted(acceptable_conclusions, key=str), 2)
    )
    return DecisionResult(
        acceptable_options=acceptable,
        per_option={option: tuple(expls) for option, expls in per_option.items()},
        ambiguous=ambiguous,
        arguments=tuple(accepted_args),
        priorities=priorities,
    )


def decide(theory: Theory, ctx: QueryContext) -> DecisionResult:
    """Ground and decide in one step."""
    return acceptable_options(ground_theory(theory, ctx), theory)


def decide_with_abduction(theory: Theory, ctx: QueryContext, target: str) -> list:
    """Subset-minimal assumption sets making the target option acceptable.

    Exhaustive over subsets of the ground abducible vocabulary, smallest
    first; supersets of a returned set are never reconsidered, so the result
    is an antichain.  Each entry pairs the assumption set with one
    explanation of the target under it.
    """
    if target not in option_heads(theory):
        raise UnknownOptionError(f"unknown option {target!r}")
    vocabulary = abducible_vocabulary(theory, ctx)
    found: list = []
    for size in range(len(vocabulary) + 1):
        for subset in itertools.combinations(vocabulary, size):
            assumption_set = frozenset(subset)
            if any(kept <= assumption_set for kept, _ in found):
                continue
            result = decide(theory, ctx.with_assumed(assumption_set))
            if target in result.acceptable_options:
                found.append((assumption_set, result.per_option[target][0]))
    return found
