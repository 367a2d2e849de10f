"""Explanation records for decisions, their JSON/text renderings, and replay.

An explanation is structured data first: the ground rules that derived the
option, the priority chain that put down each competing rule, the context
facts those rules consumed, and any hypotheses assumed.  ``replay`` checks
an explanation against the theory from scratch, so an unfaithful
explanation is detectable rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .errors import InconsistentInputsError
from .grounding import GroundRule, QueryContext, ground_theory
from .language import DomainLit, Number, PreferLit, Theory


@dataclass(frozen=True)
class DefeatRecord:
    """One competing rule this explanation accounts for.

    An empty chain means mutual attack: neither side was strictly stronger,
    both survive, and the result is flagged ambiguous.
    """

    option: str
    rule: str
    chain: tuple  # instance ids of the priority chain, level 1 upward


@dataclass(frozen=True)
class Explanation:
    option: str
    conclusion: DomainLit
    decision_rules: tuple  # GroundRule, conclusion rule first
    priority_rules: tuple  # GroundRule: chain instances plus their belief support
    facts_used: tuple  # ground DomainLit drawn from the query context
    assumptions: tuple  # abducible DomainLit hypothesized
    defeated: tuple  # DefeatRecord


def ground_rule_to_json(rule: GroundRule) -> dict:
    return {
        "label": rule.schema_label,
        "instance": rule.instance_id,
        "head": str(rule.head),
        "premises": [str(p.literal) for p in rule.premises],
        "conditions": [str(c.literal) for c in rule.conditions],
    }


def explanation_to_json(expl: Explanation) -> dict:
    return {
        "option": expl.option,
        "decision_rules": [ground_rule_to_json(r) for r in expl.decision_rules],
        "priority_rules": [ground_rule_to_json(r) for r in expl.priority_rules],
        "facts_used": [str(fact) for fact in expl.facts_used],
        "assumptions": [str(a) for a in expl.assumptions],
        "defeated": [
            {"option": d.option, "rule": d.rule, "chain": list(d.chain)}
            for d in expl.defeated
        ],
    }


def render_text(expl: Explanation) -> str:
    """One human-readable block per explanation, top rule first."""
    top = expl.decision_rules[0]
    conditions = ",".join(str(c.literal) for c in top.conditions) or "true"
    lines = [f"{expl.option} — because {top.schema_label}: {top.head} :- {conditions}"]
    by_instance = {r.instance_id: r for r in expl.priority_rules}
    for record in expl.defeated:
        if record.chain:
            links = " because ".join(
                f"{by_instance[iid].schema_label}: {by_instance[iid].head}"
                for iid in record.chain
                if iid in by_instance
            )
            lines.append(f"  overrides {record.rule} ({record.option}) because {links}")
        else:
            lines.append(f"  ties with {record.rule} ({record.option}); both remain acceptable")
    if expl.facts_used:
        lines.append("  using: " + ", ".join(str(f) for f in expl.facts_used))
    if expl.assumptions:
        lines.append("  assuming: " + ", ".join(str(a) for a in expl.assumptions))
    return "\n".join(lines)


def _context_from_facts(facts, assumptions) -> QueryContext:
    propositional = []
    bindings: dict[str, list[Decimal]] = {}
    for fact in facts:
        if fact.arity == 1 and isinstance(fact.args[0], Number):
            bindings.setdefault(fact.predicate, []).append(fact.args[0].value)
        else:
            propositional.append(fact)
    return QueryContext.make(propositional, bindings, assumptions)


def _derives(rules, conclusion) -> bool:
    """Do these ground rules alone re-derive the conclusion from their leaves?"""
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
    return conclusion in established


def replay(expl: Explanation, theory: Theory) -> bool:
    """Re-run grounding on exactly the explanation's facts and assumptions.

    True iff every listed rule re-grounds satisfied, the decision rules
    re-derive the option, and each defeat chain still starts with a priority
    instance that puts the explanation's top rule above the competing rule.
    """
    ctx = _context_from_facts(expl.facts_used, expl.assumptions)
    try:
        ground = {rule.instance_id: rule for rule in ground_theory(theory, ctx)}
    except Exception:
        return False
    replayed = []
    for rule in expl.decision_rules:
        again = ground.get(rule.instance_id)
        if again is None or not again.satisfied:
            return False
        replayed.append(again)
    if not _derives(replayed, expl.conclusion):
        return False
    top_label = expl.decision_rules[0].schema_label
    listed = {rule.instance_id for rule in expl.priority_rules}
    for record in expl.defeated:
        if not set(record.chain) <= listed:
            return False
        for instance_id in record.chain:
            again = ground.get(instance_id)
            if again is None or not again.satisfied:
                return False
        if record.chain:
            first = ground[record.chain[0]]
            if first.head != PreferLit(top_label, record.rule):
                return False
    return True


def explain(result, ground, theory: Theory, ctx: QueryContext) -> dict:
    """Per-option explanations for a decision result.

    The result must have been produced from the same ground set; the checks
    recompute the verdict and raise :class:`InconsistentInputsError` on any
    disagreement, so a stale or doctored result cannot be explained.
    """
    from .engine import acceptable_options

    fresh = acceptable_options(ground, theory)
    if (
        fresh.acceptable_options != result.acceptable_options
        or fresh.ambiguous != result.ambiguous
    ):
        raise InconsistentInputsError(
            "decision result does not match the supplied ground rules"
        )
    return dict(result.per_option)
