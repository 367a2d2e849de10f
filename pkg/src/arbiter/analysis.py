"""Static analysis over parsed theories: priority levels, vocabulary, diagnostics.

The level of a rule formalizes the priority hierarchy: rules concluding
domain literals sit at level 0, rules concluding ``prefer(a,b)`` sit one
level above the rules they relate.  Levels must stratify: both targets of
a prefer head need the same level, and level assignment cannot cycle.
"""

from __future__ import annotations

from .errors import Diagnostic, StratificationError
from .language import (
    DomainLit,
    Number,
    PreferLit,
    RuleClause,
    Theory,
    Variable,
)


def theory_levels(theory: Theory) -> dict[str, int]:
    """Level of every rule; raises StratificationError on mismatch or cycle."""
    by_label = {clause.label: clause for clause in theory.rules}
    levels: dict[str, int] = {}
    in_progress: set[str] = set()

    def level(label: str) -> int:
        if label in levels:
            return levels[label]
        if label in in_progress:
            raise StratificationError(f"priority level of rule {label!r} depends on itself")
        clause = by_label[label]
        if isinstance(clause.head, DomainLit):
            levels[label] = 0
            return 0
        in_progress.add(label)
        try:
            stronger = level(clause.head.stronger)
            weaker = level(clause.head.weaker)
        finally:
            in_progress.discard(label)
        if stronger != weaker:
            raise StratificationError(
                f"rule {label!r} prefers {clause.head.stronger!r} (level {stronger}) over "
                f"{clause.head.weaker!r} (level {weaker}); both must sit at the same level"
            )
        levels[label] = stronger + 1
        return levels[label]

    for clause in theory.rules:
        level(clause.label)
    return levels


def level_of(theory: Theory, label: str) -> int:
    """Level of one rule: 0 for domain heads, 1 + target level for prefer heads."""
    levels = theory_levels(theory)
    if label not in levels:
        raise KeyError(label)
    return levels[label]


def max_level(theory: Theory) -> int:
    levels = theory_levels(theory)
    return max(levels.values(), default=0)


def derived_indicators(theory: Theory) -> frozenset:
    """(predicate, arity) pairs concluded by level-0 rules."""
    return frozenset(
        clause.head.indicator
        for clause in theory.rules
        if isinstance(clause.head, DomainLit)
    )


def _body_domain_literals(clause: RuleClause, theory: Theory):
    """Domain literals the clause needs satisfied: conditions plus non-abducible premises."""
    abducible = {schema.indicator for schema in theory.abducibles}
    for cond in clause.conditions:
        if isinstance(cond, DomainLit):
            yield cond
    for premise in clause.premises:
        if premise.indicator not in abducible:
            yield premise


def _suppliable(literal: DomainLit) -> bool:
    """Can a query context ever provide this literal?

    Contexts carry zero-arity facts and single-value numeric bindings, so an
    input literal is satisfiable only at arity 0, or at arity 1 with a number
    or variable in argument position.
    """
    if literal.arity == 0:
        return True
    if literal.arity == 1:
        return isinstance(literal.args[0], (Number, Variable))
    return False


def input_vocabulary(theory: Theory) -> dict:
    """Input predicates (not derived by any rule), mapped to their kind.

    Kind is ``"propositional"`` for arity 0 and ``"numeric"`` for arity 1;
    literals a context can never supply are reported by validate_theory
    instead of listed here.
    """
    derived = derived_indicators(theory)
    vocabulary: dict[tuple[str, int], str] = {}
    for clause in theory.rules:
        for literal in _body_domain_literals(clause, theory):
            if literal.indicator in derived or not _suppliable(literal):
                continue
            kind = "propositional" if literal.arity == 0 else "numeric"
            vocabulary.setdefault(literal.indicator, kind)
    return vocabulary


def option_heads(theory: Theory) -> dict:
    """Level-0 head literals that participate in a complement pair, by option id."""
    complement_indicators = set()
    for a, b in theory.complements:
        complement_indicators.add(a.indicator)
        complement_indicators.add(b.indicator)
    levels = theory_levels(theory)
    options: dict[str, DomainLit] = {}
    for clause in theory.rules:
        if levels[clause.label] != 0:
            continue
        head = clause.head
        if head.indicator in complement_indicators:
            options.setdefault(head.predicate, head)
    return options


def options_of(theory: Theory) -> tuple:
    return tuple(sorted(option_heads(theory)))


def validate_theory(theory: Theory) -> list[Diagnostic]:
    """Static findings on a parsed theory.  Diagnostics, not failures.

    - missing-complement (warning): a terminal level-0 conclusion that no
      complement pair covers, so nothing can ever conflict with it.
    - unresolved-conflict (info): a complement pair whose competing rules
      have no governing preference; only disjoint scenarios keep it decided.
    - unused-abducible (warning): declared hypothesis no premise mentions.
    - unreachable-rule (warning): a rule needs a literal no context can
      supply and no rule derives.
    """
    diagnostics: list[Diagnostic] = []
    try:
        levels = theory_levels(theory)
    except StratificationError as exc:
        return [Diagnostic("error", "stratification", str(exc))]

    derived = derived_indicators(theory)
    complement_indicators = set()
    for a, b in theory.complements:
        complement_indicators.add(a.indicator)
        complement_indicators.add(b.indicator)

    used_in_bodies = set()
    for clause in theory.rules:
        for literal in clause.conditions:
            if isinstance(literal, DomainLit):
                used_in_bodies.add(literal.indicator)
        for premise in clause.premises:
            used_in_bodies.add(premise.indicator)

    for clause in theory.rules:
        if levels[clause.label] != 0:
            continue
        head = clause.head
        if head.indicator in complement_indicators or head.indicator in used_in_bodies:
            continue
        diagnostics.append(
            Diagnostic(
                "warning",
                "missing-complement",
                f"conclusion {head} has no complement; no conflict can ever arise",
                labels=(clause.label,),
            )
        )

    # Preference coverage: for each complement pair, find competing level-0
    # rule pairs no level-1 preference relates (in either direction).
    preferred_pairs = set()
    for clause in theory.rules:
        if isinstance(clause.head, PreferLit):
            preferred_pairs.add(frozenset((clause.head.stronger, clause.head.weaker)))
    for a, b in theory.complements:
        rules_a = [c for c in theory.rules if levels[c.label] == 0 and c.head.indicator == a.indicator]
        rules_b = [c for c in theory.rules if levels[c.label] == 0 and c.head.indicator == b.indicator]
        ungoverned = [
            (ra.label, rb.label)
            for ra in rules_a
            for rb in rules_b
            if frozenset((ra.label, rb.label)) not in preferred_pairs
        ]
        if ungoverned:
            pairs = ", ".join(f"{x}/{y}" for x, y in ungoverned)
            diagnostics.append(
                Diagnostic(
                    "info",
                    "unresolved-conflict",
                    f"conflict between {a} and {b} has no preference for rule pairs: {pairs}",
                    labels=tuple(sorted({label for pair in ungoverned for label in pair})),
                )
            )

    premise_indicators = {
        premise.indicator for clause in theory.rules for premise in clause.premises
    }
    for schema in theory.abducibles:
        if schema.indicator not in premise_indicators:
            diagnostics.append(
                Diagnostic(
                    "warning",
                    "unused-abducible",
                    f"abducible {schema} appears in no rule premises",
                )
            )

    for clause in theory.rules:
        for literal in _body_domain_literals(clause, theory):
            if literal.indicator in derived or _suppliable(literal):
                continue
            diagnostics.append(
                Diagnostic(
                    "warning",
                    "unreachable-rule",
                    f"rule {clause.label} needs {literal}, which no context can "
                    f"supply and no rule derives",
                    labels=(clause.label,),
                )
            )
    return diagnostics
