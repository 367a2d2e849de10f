"""Recursive-descent parser for the rule language.

Grammar (one clause per ``.``; ``%`` starts a comment):

    clause      := rule | complement | abducible
    rule        := 'rule' '(' label ',' head ',' '[' premises ']' ')' [':-' body] '.'
    head        := 'prefer' '(' label ',' label ')' | domain
    premises    := [domain {',' domain}]
    body        := condition {',' condition}
    condition   := domain | arith cmp arith
    domain      := ident ['(' term {',' term} ')']
    term        := ident ['(' term {',' term} ')'] | number | variable
    arith       := mult {('+'|'-') mult}
    mult        := power {('*'|'/') power}
    power       := primary ['**' power]
    primary     := number | variable | '(' arith ')'
    cmp         := '>' | '<' | '>=' | '=<' | '='

``=<`` is the less-or-equal token; ``<=`` is rejected outright.  Arithmetic
is allowed only inside comparisons, and comparisons only in rule bodies.
``prefer`` is reserved: it may appear only as a rule head, with exactly two
rule labels as arguments.

Beyond syntax, :func:`parse_theory` enforces the structural invariants of a
well-formed theory: unique labels, prefer targets that exist and are exactly
one level down, and range restriction (every variable of the head, the
premises, and the comparisons must occur in some body predicate).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from .errors import (
    DanglingPreferTargetError,
    DuplicateLabelError,
    ParseError,
    RangeRestrictionError,
)
from .language import (
    ArithExpr,
    Atom,
    BuiltinLit,
    Compound,
    DomainLit,
    Number,
    PreferLit,
    RuleClause,
    Theory,
    Variable,
    literal_variables,
    normalize_complements,
)

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<number>\d+(?:\.\d+)?)
    | (?P<ident>[a-z][a-zA-Z0-9_]*)
    | (?P<var>[A-Z_][a-zA-Z0-9_]*)
    | (?P<badle><=)
    | (?P<sym>:-|>=|=<|\*\*|[()\[\],.<>=+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'number' | 'ident' | 'var' | 'sym' | 'eof'
    value: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ParseError(
                f"unexpected character {source[pos]!r}",
                line=line,
                column=pos - line_start + 1,
            )
        kind = match.lastgroup
        text = match.group()
        column = pos - line_start + 1
        if kind == "badle":
            raise ParseError(
                "'<=' is not an operator; less-or-equal is written '=<'",
                line=line,
                column=column,
            )
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, column))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = match.end()
    tokens.append(Token("eof", "", line, len(source) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, expected) -> ParseError:
        tok = self.current
        shown = tok.value if tok.kind != "eof" else "end of input"
        return ParseError(
            f"unexpected {shown!r}", line=tok.line, column=tok.column, expected=expected
        )

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        tok = self.current
        if tok.kind == kind and (value is None or tok.value == value):
            self.pos += 1
            return tok
        return None

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.accept(kind, value)
        if tok is None:
            raise self.error([value if value is not None else f"<{kind}>"])
        return tok

    # -- clauses ----------------------------------------------------------

    def theory(self) -> tuple[list[RuleClause], list, list]:
        rules, complements, abducibles = [], [], []
        while self.current.kind != "eof":
            if self.accept("ident", "rule"):
                rules.append(self.rule_clause())
            elif self.accept("ident", "complement"):
                complements.append(self.complement_clause())
            elif self.accept("ident", "abducible"):
                abducibles.append(self.abducible_clause())
            else:
                raise self.error(["rule", "complement", "abducible"])
        return rules, complements, abducibles

    def rule_clause(self) -> RuleClause:
        self.expect("sym", "(")
        label = self.expect("ident").value
        self.expect("sym", ",")
        head = self.head()
        self.expect("sym", ",")
        self.expect("sym", "[")
        premises = []
        if not self.accept("sym", "]"):
            premises.append(self.domain_literal())
            while self.accept("sym", ","):
                premises.append(self.domain_literal())
            self.expect("sym", "]")
        self.expect("sym", ")")
        conditions = []
        if self.accept("sym", ":-"):
            conditions.append(self.condition())
            while self.accept("sym", ","):
                conditions.append(self.condition())
        self.expect("sym", ".")
        return RuleClause(label, head, tuple(premises), tuple(conditions))

    def complement_clause(self) -> tuple[DomainLit, DomainLit]:
        self.expect("sym", "(")
        first = self.domain_literal()
        self.expect("sym", ",")
        second = self.domain_literal()
        self.expect("sym", ")")
        self.expect("sym", ".")
        return (first, second)

    def abducible_clause(self) -> DomainLit:
        self.expect("sym", "(")
        schema = self.domain_literal()
        self.expect("sym", ")")
        self.expect("sym", ".")
        return schema

    # -- heads, literals, terms --------------------------------------------

    def head(self):
        if self.current.kind == "ident" and self.current.value == "prefer":
            self.pos += 1
            self.expect("sym", "(")
            stronger = self.expect("ident").value
            self.expect("sym", ",")
            weaker = self.expect("ident").value
            self.expect("sym", ")")
            return PreferLit(stronger, weaker)
        return self.domain_literal()

    def domain_literal(self) -> DomainLit:
        name = self.expect("ident")
        if name.value == "prefer":
            raise ParseError(
                "'prefer' is reserved for rule heads",
                line=name.line,
                column=name.column,
            )
        args = []
        if self.accept("sym", "("):
            args.append(self.term())
            while self.accept("sym", ","):
                args.append(self.term())
            self.expect("sym", ")")
        return DomainLit(name.value, tuple(args))

    def term(self):
        tok = self.current
        if tok.kind == "number":
            self.pos += 1
            return Number(Decimal(tok.value))
        if tok.kind == "var":
            self.pos += 1
            return Variable(tok.value)
        if tok.kind == "ident":
            self.pos += 1
            if self.accept("sym", "("):
                args = [self.term()]
                while self.accept("sym", ","):
                    args.append(self.term())
                self.expect("sym", ")")
                return Compound(tok.value, tuple(args))
            return Atom(tok.value)
        raise self.error(["<term>"])

    def condition(self):
        if self.current.kind == "ident":
            literal = self.domain_literal()
            if self.current.kind == "sym" and self.current.value in (">", "<", ">=", "=<", "="):
                raise ParseError(
                    "comparison operands must be numbers, variables, or arithmetic",
                    line=self.current.line,
                    column=self.current.column,
                )
            return literal
        lhs = self.arith()
        op_tok = self.current
        if op_tok.kind != "sym" or op_tok.value not in (">", "<", ">=", "=<", "="):
            raise self.error([">", "<", ">=", "=<", "="])
        self.pos += 1
        rhs = self.arith()
        return BuiltinLit(op_tok.value, lhs, rhs)

    def arith(self):
        node = self.arith_mult()
        while self.current.kind == "sym" and self.current.value in ("+", "-"):
            op = self.current.value
            self.pos += 1
            node = ArithExpr(op, node, self.arith_mult())
        return node

    def arith_mult(self):
        node = self.arith_power()
        while self.current.kind == "sym" and self.current.value in ("*", "/"):
            op = self.current.value
            self.pos += 1
            node = ArithExpr(op, node, self.arith_power())
        return node

    def arith_power(self):
        node = self.arith_primary()
        if self.current.kind == "sym" and self.current.value == "**":
            self.pos += 1
            return ArithExpr("**", node, self.arith_power())
        return node

    def arith_primary(self):
        tok = self.current
        if tok.kind == "number":
            self.pos += 1
            return Number(Decimal(tok.value))
        if tok.kind == "var":
            self.pos += 1
            return Variable(tok.value)
        if self.accept("sym", "("):
            node = self.arith()
            self.expect("sym", ")")
            return node
        raise self.error(["<number>", "<variable>", "("])


def validate_structure(rules) -> None:
    """Label uniqueness, prefer-target existence, and range restriction."""
    labels = set()
    for clause in rules:
        if clause.label in labels:
            raise DuplicateLabelError(clause.label)
        labels.add(clause.label)
    for clause in rules:
        if isinstance(clause.head, PreferLit):
            for target in (clause.head.stronger, clause.head.weaker):
                if target not in labels:
                    raise DanglingPreferTargetError(clause.label, target)
    for clause in rules:
        bound = set()
        for cond in clause.conditions:
            if isinstance(cond, DomainLit):
                bound |= literal_variables(cond)
        used = set()
        if isinstance(clause.head, DomainLit):
            used |= literal_variables(clause.head)
        for premise in clause.premises:
            used |= literal_variables(premise)
        for cond in clause.conditions:
            if isinstance(cond, BuiltinLit):
                used |= literal_variables(cond)
        for name in sorted(used - bound):
            raise RangeRestrictionError(clause.label, name)


def parse_theory(source: str) -> Theory:
    """Parse rule-language text into a validated :class:`Theory`.

    Raises :class:`ParseError` (with position and expected tokens),
    :class:`DuplicateLabelError`, :class:`DanglingPreferTargetError`,
    :class:`RangeRestrictionError`, or :class:`StratificationError`.
    """
    rules, complements, abducibles = _Parser(tokenize(source)).theory()
    validate_structure(rules)
    theory = Theory(
        rules=tuple(rules),
        complements=normalize_complements(complements),
        abducibles=tuple(dict.fromkeys(abducibles)),
    )
    # Level assignment doubles as the stratification check.
    from .analysis import theory_levels

    theory_levels(theory)
    return theory


def parse_condition_list(source: str, line_offset: int = 0) -> tuple:
    """Parse a bare comma-separated condition list (used by the policy format)."""
    try:
        parser = _Parser(tokenize(source))
        conditions = [parser.condition()]
        while parser.accept("sym", ","):
            conditions.append(parser.condition())
        if parser.current.kind != "eof":
            raise parser.error(["end of conditions"])
    except ParseError as exc:
        if line_offset and exc.line is not None:
            raise ParseError(
                exc.message, line=exc.line + line_offset - 1, column=exc.column,
                expected=exc.expected,
            ) from exc
        raise
    return tuple(conditions)
