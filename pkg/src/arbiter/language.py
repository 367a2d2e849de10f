"""Abstract syntax for the rule language, plus the canonical text rendering.

A theory is a list of labeled defeasible rules together with complement
declarations (mutual conflict between conclusions) and abducible
declarations (literals the engine may hypothesize).  The concrete syntax
is one clause per line:

    rule(r1,accept,[]):-offered_salary(O),expected_salary(E),O>=E.
    rule(p1,prefer(r3,r4),[]).
    complement(accept,refuse).
    abducible(budget_frozen).

Rendering is canonical: ``parse_theory(render_theory(t))`` is structurally
identical to ``t``.  Numbers are exact decimals; value-equal numbers such
as 0.7 and 0.70 compare (and hash) equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

ATOM_RE = r"[a-z][a-zA-Z0-9_]*"
VARIABLE_RE = r"[A-Z_][a-zA-Z0-9_]*"

COMPARISON_OPS = (">", "<", ">=", "=<", "=")
ARITH_OPS = ("+", "-", "*", "/", "**")


def canonical_decimal(value: Decimal) -> str:
    """Plain decimal text without exponent notation: 8E+4 -> '80000'."""
    if value == 0:
        return "0"
    return format(value.normalize(), "f")


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Number:
    value: Decimal

    def __str__(self):
        return canonical_decimal(self.value)


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __str__(self):
        return f"{self.functor}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class ArithExpr:
    """Binary arithmetic expression; operands are Number, Variable or ArithExpr."""

    op: str
    lhs: object
    rhs: object

    def __str__(self):
        return f"{_wrap(self.lhs)}{self.op}{_wrap(self.rhs)}"


def _wrap(term) -> str:
    # Sub-expressions are always parenthesized, so rendering never depends
    # on operator precedence and re-parsing is unambiguous.
    return f"({term})" if isinstance(term, ArithExpr) else str(term)


Term = Atom | Number | Variable | Compound | ArithExpr


# ---------------------------------------------------------------------------
# Literals


@dataclass(frozen=True)
class DomainLit:
    """A domain predicate applied to terms; zero args make a propositional fact."""

    predicate: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.predicate, len(self.args))


@dataclass(frozen=True)
class BuiltinLit:
    """A comparison between two arithmetic terms; only valid in rule bodies."""

    op: str
    lhs: object
    rhs: object

    def __str__(self):
        return f"{self.lhs}{self.op}{self.rhs}"


@dataclass(frozen=True)
class PreferLit:
    """prefer(stronger, weaker): the named rule beats the other when both apply."""

    stronger: str
    weaker: str

    def __str__(self):
        return f"prefer({self.stronger},{self.weaker})"


Literal = DomainLit | BuiltinLit | PreferLit


# ---------------------------------------------------------------------------
# Clauses and theories


@dataclass(frozen=True)
class RuleClause:
    """rule(label, head, [premises]) :- conditions."""

    label: str
    head: DomainLit | PreferLit
    premises: tuple = ()
    conditions: tuple = ()

    def __str__(self):
        prem = ",".join(str(p) for p in self.premises)
        text = f"rule({self.label},{self.head},[{prem}])"
        if self.conditions:
            text += ":-" + ",".join(str(c) for c in self.conditions)
        return text + "."


def complement_key(pair: tuple[DomainLit, DomainLit]) -> tuple[str, str]:
    a, b = str(pair[0]), str(pair[1])
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Theory:
    """Parsed rule set; complements are stored unordered and deduplicated."""

    rules: tuple = ()
    complements: tuple = ()
    abducibles: tuple = ()

    def rule(self, label: str) -> RuleClause:
        for clause in self.rules:
            if clause.label == label:
                return clause
        raise KeyError(label)

    def labels(self) -> tuple[str, ...]:
        return tuple(clause.label for clause in self.rules)

    def complement_pairs(self) -> frozenset:
        return frozenset(complement_key(pair) for pair in self.complements)

    def are_complementary(self, a: DomainLit, b: DomainLit) -> bool:
        return complement_key((a, b)) in self.complement_pairs()

    def __eq__(self, other):
        if not isinstance(other, Theory):
            return NotImplemented
        return (
            self.rules == other.rules
            and self.complement_pairs() == other.complement_pairs()
            and frozenset(self.abducibles) == frozenset(other.abducibles)
        )

    def __hash__(self):
        return hash((self.rules, self.complement_pairs(), frozenset(self.abducibles)))


def normalize_complements(pairs) -> tuple:
    """Deduplicate symmetric complement declarations, keeping a canonical order."""
    seen = {}
    for pair in pairs:
        key = complement_key(pair)
        if key not in seen:
            a, b = pair
            seen[key] = (a, b) if str(a) <= str(b) else (b, a)
    return tuple(seen[key] for key in sorted(seen))


def render_theory(theory: Theory) -> str:
    """One clause per line; complement pairs expand to both directions."""
    lines = [str(clause) for clause in theory.rules]
    for a, b in theory.complements:
        lines.append(f"complement({a},{b}).")
        lines.append(f"complement({b},{a}).")
    for schema in theory.abducibles:
        lines.append(f"abducible({schema}).")
    return "\n".join(lines) + ("\n" if lines else "")


def term_variables(term) -> set[str]:
    if isinstance(term, Variable):
        return {term.name}
    if isinstance(term, Compound):
        names = set()
        for arg in term.args:
            names |= term_variables(arg)
        return names
    if isinstance(term, ArithExpr):
        return term_variables(term.lhs) | term_variables(term.rhs)
    return set()


def literal_variables(literal) -> set[str]:
    if isinstance(literal, DomainLit):
        names = set()
        for arg in literal.args:
            names |= term_variables(arg)
        return names
    if isinstance(literal, BuiltinLit):
        return term_variables(literal.lhs) | term_variables(literal.rhs)
    return set()


def is_ground(literal) -> bool:
    return not literal_variables(literal)
