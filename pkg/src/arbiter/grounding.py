"""Instantiate a theory against a query context.

Grounding binds rule variables by matching body predicates against the
context (propositional facts, numeric bindings, assumed hypotheses) and
against derived facts (heads of already-satisfied level-0 rules, iterated
to fixpoint), then evaluates the arithmetic comparisons.  Rules whose
bodies cannot be satisfied produce nothing, with one exception: a level-0
rule whose only unmet premises are declared abducibles is kept, with those
premises recorded as open assumptions for the abduction search.

Arithmetic is exact decimal for + - * and integer powers; division runs at
50 significant digits; any other exponent falls back to binary floating
point and the enclosing comparison then rounds both sides to 12
significant digits.  Division by zero raises ZeroDivisionError.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Context, Decimal, Inexact, localcontext

from .analysis import theory_levels
from .errors import ArbiterError, UnboundVariableError, UnknownReferenceError
from .language import (
    ArithExpr,
    Atom,
    BuiltinLit,
    Compound,
    DomainLit,
    Number,
    Theory,
    Variable,
    is_ground,
)

_PRECISION = 50
_FALLBACK_DIGITS = 12
_ROUND12 = Context(prec=_FALLBACK_DIGITS)


class EvaluationError(ArbiterError):
    """A comparison or arithmetic operand did not evaluate to a number."""


# ---------------------------------------------------------------------------
# Query context


@dataclass(frozen=True)
class QueryContext:
    """Input facts for one decision.

    ``propositional_facts`` are zero-arity literals; ``numeric_bindings``
    maps an input predicate to one or more decimal values (several values
    yield cross-product instances); ``assumed`` holds abducible instances
    hypothesized during abduction.
    """

    propositional_facts: frozenset = frozenset()
    numeric_bindings: tuple = ()  # ((name, (Decimal, ...)), ...)
    assumed: frozenset = frozenset()

    @classmethod
    def make(cls, facts=(), bindings=None, assumed=()) -> "QueryContext":
        props = frozenset(
            fact if isinstance(fact, DomainLit) else DomainLit(str(fact))
            for fact in facts
        )
        numeric = []
        for name, values in (bindings or {}).items():
            if isinstance(values, (list, tuple, set, frozenset)):
                decimals = tuple(Decimal(str(v)) for v in values)
            else:
                decimals = (Decimal(str(values)),)
            numeric.append((name, decimals))
        hypotheses = frozenset(
            lit if isinstance(lit, DomainLit) else DomainLit(str(lit))
            for lit in assumed
        )
        return cls(props, tuple(sorted(numeric)), hypotheses)

    def with_assumed(self, extra) -> "QueryContext":
        return replace(self, assumed=self.assumed | frozenset(extra))

    def fact_sources(self) -> dict:
        """All ground facts the context supplies, mapped to their provenance."""
        sources = {}
        for fact in self.propositional_facts:
            sources[fact] = "context"
        for name, values in self.numeric_bindings:
            for value in values:
                sources[DomainLit(name, (Number(value),))] = "context"
        for hypothesis in self.assumed:
            sources.setdefault(hypothesis, "assumed")
        return sources


# ---------------------------------------------------------------------------
# Arithmetic


def _eval_term(term, binding) -> tuple[Decimal, bool]:
    """Evaluate to (value, exact); exact means no rounding happened anywhere."""
    if isinstance(term, Number):
        return term.value, True
    if isinstance(term, Variable):
        bound = binding.get(term.name)
        if bound is None:
            raise UnboundVariableError(
                f"variable {term.name!r} reached evaluation unbound (validator bug)"
            )
        if not isinstance(bound, Number):
            raise EvaluationError(f"variable {term.name!r} is bound to non-number {bound}")
        return bound.value, True
    if isinstance(term, ArithExpr):
        lhs, lexact = _eval_term(term.lhs, binding)
        rhs, rexact = _eval_term(term.rhs, binding)
        value, op_exact = _apply(term.op, lhs, rhs)
        return value, lexact and rexact and op_exact
    raise EvaluationError(f"term {term} cannot be evaluated numerically")


def _apply(op: str, lhs: Decimal, rhs: Decimal) -> tuple[Decimal, bool]:
    with localcontext() as ctx:
        ctx.prec = _PRECISION
        ctx.traps[Inexact] = False
        ctx.clear_flags()
        if op == "+":
            value = lhs + rhs
        elif op == "-":
            value = lhs - rhs
        elif op == "*":
            value = lhs * rhs
        elif op == "/":
            if rhs == 0:
                raise ZeroDivisionError(f"division by zero: {lhs}/{rhs}")
            value = lhs / rhs
        elif op == "**":
            return _power(lhs, rhs)
        else:
            raise EvaluationError(f"unknown arithmetic operator {op!r}")
        return value, not ctx.flags[Inexact]


def _power(base: Decimal, exponent: Decimal) -> tuple[Decimal, bool]:
    if exponent == exponent.to_integral_value() and exponent >= 0:
        with localcontext() as ctx:
            ctx.prec = _PRECISION
            ctx.traps[Inexact] = False
            ctx.clear_flags()
            value = base ** int(exponent)
            return value, not ctx.flags[Inexact]
    try:
        result = float(base) ** float(exponent)
    except (OverflowError, ZeroDivisionError) as exc:
        raise EvaluationError(f"cannot evaluate {base}**{exponent}: {exc}") from exc
    if isinstance(result, complex):
        raise EvaluationError(f"{base}**{exponent} is not a real number")
    return Decimal(repr(result)), False


def eval_builtin(op: str, lhs: Decimal, rhs: Decimal, exact: bool = True) -> bool:
    """Compare two evaluated operands.

    Exact operands compare exactly; if either side went through the floating
    point fallback, both are first rounded to 12 significant digits.
    """
    if not exact:
        lhs = _ROUND12.plus(lhs)
        rhs = _ROUND12.plus(rhs)
    if op == ">":
        return lhs > rhs
    if op == "<":
        return lhs < rhs
    if op == ">=":
        return lhs >= rhs
    if op == "=<":
        return lhs <= rhs
    if op == "=":
        return lhs == rhs
    raise EvaluationError(f"unknown comparison operator {op!r}")


def builtin_holds(literal: BuiltinLit, binding) -> bool:
    lhs, lexact = _eval_term(literal.lhs, binding)
    rhs, rexact = _eval_term(literal.rhs, binding)
    return eval_builtin(literal.op, lhs, rhs, exact=lexact and rexact)


# ---------------------------------------------------------------------------
# Matching and substitution


def match_term(pattern, ground, binding):
    """Extend binding so pattern equals the ground term, or return None."""
    if isinstance(pattern, Variable):
        bound = binding.get(pattern.name)
        if bound is None:
            extended = dict(binding)
            extended[pattern.name] = ground
            return extended
        return binding if bound == ground else None
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
        for p_arg, g_arg in zip(pattern.args, ground.args):
            binding = match_term(p_arg, g_arg, binding)
            if binding is None:
                return None
        return binding
    return None


def match_literal(pattern: DomainLit, fact: DomainLit, binding):
    if pattern.indicator != fact.indicator:
        return None
    for p_arg, f_arg in zip(pattern.args, fact.args):
        binding = match_term(p_arg, f_arg, binding)
        if binding is None:
            return None
    return binding


def substitute_term(term, binding):
    if isinstance(term, Variable):
        bound = binding.get(term.name)
        if bound is None:
            raise UnboundVariableError(
                f"variable {term.name!r} has no binding (validator bug)"
            )
        return bound
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(substitute_term(a, binding) for a in term.args))
    if isinstance(term, ArithExpr):
        return ArithExpr(
            term.op, substitute_term(term.lhs, binding), substitute_term(term.rhs, binding)
        )
    return term


def substitute_literal(literal, binding):
    if isinstance(literal, DomainLit):
        return DomainLit(literal.predicate, tuple(substitute_term(a, binding) for a in literal.args))
    if isinstance(literal, BuiltinLit):
        return BuiltinLit(
            literal.op, substitute_term(literal.lhs, binding), substitute_term(literal.rhs, binding)
        )
    return literal


# ---------------------------------------------------------------------------
# Ground rules


@dataclass(frozen=True)
class GroundCondition:
    literal: object
    source: str  # 'context' | 'assumed' | 'derived' | 'builtin'


@dataclass(frozen=True)
class GroundPremise:
    literal: DomainLit
    source: str  # 'context' | 'assumed' | 'derived' | 'open'


@dataclass(frozen=True)
class GroundRule:
    """One variable-free instance of a rule schema."""

    schema_label: str
    instance_id: str
    head: object
    premises: tuple = ()
    conditions: tuple = ()
    level: int = 0
    satisfied: bool = True

    @property
    def open_assumptions(self) -> frozenset:
        return frozenset(p.literal for p in self.premises if p.source == "open")

    @property
    def assumed_leaves(self) -> frozenset:
        used = {p.literal for p in self.premises if p.source == "assumed"}
        used |= {c.literal for c in self.conditions if c.source == "assumed"}
        return frozenset(used)

    def derived_subgoals(self) -> tuple:
        goals = [c.literal for c in self.conditions if c.source == "derived"]
        goals += [p.literal for p in self.premises if p.source == "derived"]
        return tuple(goals)

    def context_facts(self) -> frozenset:
        used = {c.literal for c in self.conditions if c.source == "context"}
        used |= {p.literal for p in self.premises if p.source == "context"}
        return frozenset(used)


def _instance_id(label: str, binding) -> str:
    if not binding:
        return label
    inner = ",".join(f"{name}={binding[name]}" for name in sorted(binding))
    return f"{label}[{inner}]"


def _bindings_for(clause, fact_pool) -> list[dict]:
    """All variable bindings satisfying the clause's domain conditions."""
    states = [{}]
    for cond in clause.conditions:
        if not isinstance(cond, DomainLit):
            continue
        candidates = sorted(
            (fact for fact in fact_pool if fact.indicator == cond.indicator),
            key=str,
        )
        next_states = []
        seen = set()
        for state in states:
            for fact in candidates:
                extended = match_literal(cond, fact, state)
                if extended is None:
                    continue
                key = tuple(sorted((k, str(v)) for k, v in extended.items()))
                if key not in seen:
                    seen.add(key)
                    next_states.append(extended)
        states = next_states
        if not states:
            break
    return states


def _is_abducible(literal: DomainLit, theory: Theory) -> bool:
    return any(match_literal(schema, literal, {}) is not None for schema in theory.abducibles)


def _satisfied_instances(theory, levels, sources):
    """One pass over all schemas against the current fact pool."""
    pool = set(sources)
    results = []
    for clause in theory.rules:
        level = levels[clause.label]
        for binding in _bindings_for(clause, pool):
            if not all(
                builtin_holds(cond, binding)
                for cond in clause.conditions
                if isinstance(cond, BuiltinLit)
            ):
                continue
            premises = []
            viable = True
            for premise in clause.premises:
                instance = substitute_literal(premise, binding)
                source = sources.get(instance)
                if source is not None:
                    premises.append(GroundPremise(instance, source))
                elif level == 0 and _is_abducible(instance, theory):
                    premises.append(GroundPremise(instance, "open"))
                else:
                    viable = False
                    break
            if not viable:
                continue
            conditions = []
            for cond in clause.conditions:
                instance = substitute_literal(cond, binding)
                if isinstance(cond, DomainLit):
                    conditions.append(GroundCondition(instance, sources[instance]))
                else:
                    conditions.append(GroundCondition(instance, "builtin"))
            head = clause.head
            if isinstance(head, DomainLit):
                head = substitute_literal(head, binding)
                if not is_ground(head):
                    raise UnboundVariableError(
                        f"rule {clause.label}: head {head} is not ground"
                    )
            satisfied = all(p.source != "open" for p in premises)
            results.append(
                GroundRule(
                    schema_label=clause.label,
                    instance_id=_instance_id(clause.label, binding),
                    head=head,
                    premises=tuple(premises),
                    conditions=tuple(conditions),
                    level=level,
                    satisfied=satisfied,
                )
            )
    return results


def ground_theory(theory: Theory, ctx: QueryContext) -> tuple:
    """All ground rule instances of the theory under the context.

    Derived facts (heads of satisfied level-0 instances) are accumulated to
    fixpoint first, so instance provenance reflects the final fact pool.
    Returns instances sorted by instance id.
    """
    for hypothesis in ctx.assumed:
        if not _is_abducible(hypothesis, theory):
            raise UnknownReferenceError(
                f"assumed literal {hypothesis} is not a declared abducible"
            )
    levels = theory_levels(theory)
    sources = ctx.fact_sources()
    while True:
        new_facts = {
            rule.head
            for rule in _satisfied_instances(theory, levels, sources)
            if rule.satisfied and rule.level == 0 and rule.head not in sources
        }
        if not new_facts:
            break
        for fact in new_facts:
            sources[fact] = "derived"
    instances = {
        rule.instance_id: rule for rule in _satisfied_instances(theory, levels, sources)
    }
    return tuple(instances[key] for key in sorted(instances))


def open_assumptions(ground) -> frozenset:
    found = frozenset()
    for rule in ground:
        found |= rule.open_assumptions
    return found


def abducible_vocabulary(theory: Theory, ctx: QueryContext) -> tuple:
    """Ground abducible instances that could ever matter for this context.

    Assuming hypotheses can unlock rules whose premises mention further
    abducibles, so the open-assumption set is iterated to fixpoint.
    """
    vocabulary: set = set()
    while True:
        ground = ground_theory(theory, ctx.with_assumed(vocabulary))
        fresh = set(open_assumptions(ground)) - vocabulary
        if not fresh:
            break
        vocabulary |= fresh
    return tuple(sorted(vocabulary, key=str))
