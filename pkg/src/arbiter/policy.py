"""Scenario-based preference policies and their compilation into theories.

A policy file is line-oriented and sectioned::

    policy salary_negotiation

    OPTIONS
      accept
      refuse

    SCENARIOS
      above: the salary offered is above the expected salary
        when offered_salary(O), expected_salary(E), O>=E
      mood: the team seems welcoming
        propositional

    STATEMENTS
      s1: if above then accept

    PREFERENCES
      q1: s1 over s2
      q2: s2 over s1 when mood

``#`` starts a comment.  Scenario entries may carry a ``when`` line holding
the first-order refinement used by advanced compilation, or a
``propositional`` marker stating the scenario is deliberately left
qualitative.  Basic compilation turns each scenario sentence into one
propositional atom (lowercased, non-alphanumerics collapsed to
underscores); advanced compilation uses the refinement when present.

Preferences relate statements, or other preferences one level down;
``when`` attaches a context scenario that conditions the preference.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .analysis import input_vocabulary, options_of, theory_levels
from .errors import (
    LevelMismatchError,
    MissingAdvancedConditionError,
    ParseError,
    UnknownReferenceError,
)
from .language import DomainLit, PreferLit, RuleClause, Theory, normalize_complements
from .parser import parse_condition_list, validate_structure


@dataclass(frozen=True)
class ScenarioDef:
    id: str
    text: str
    condition: tuple | None = None  # first-order refinement literals
    propositional: bool = False  # explicitly marked qualitative

    @property
    def atom(self) -> str:
        return propositionalize(self.text)


@dataclass(frozen=True)
class DecisionStatement:
    id: str
    scenario: str
    option: str


@dataclass(frozen=True)
class PreferenceStatement:
    id: str
    stronger: str
    weaker: str
    context: str | None = None  # scenario id; absent means unconditional


@dataclass(frozen=True)
class PolicyDocument:
    name: str
    options: tuple
    scenarios: dict  # id -> ScenarioDef, declaration order
    statements: tuple
    preferences: tuple

    def levels(self) -> dict:
        """Level of every statement (0) and preference (1 + target level)."""
        statements = {s.id for s in self.statements}
        preferences = {p.id: p for p in self.preferences}
        levels: dict[str, int] = {sid: 0 for sid in statements}
        resolving: set[str] = set()

        def level(pid: str) -> int:
            if pid in levels:
                return levels[pid]
            if pid in resolving:
                raise LevelMismatchError(f"preference {pid!r} depends on itself")
            pref = preferences[pid]
            resolving.add(pid)
            try:
                stronger, weaker = level(pref.stronger), level(pref.weaker)
            finally:
                resolving.discard(pid)
            if stronger != weaker:
                raise LevelMismatchError(
                    f"preference {pid!r} relates {pref.stronger!r} (level {stronger}) "
                    f"and {pref.weaker!r} (level {weaker})"
                )
            levels[pid] = stronger + 1
            return levels[pid]

        for pid in preferences:
            level(pid)
        return levels


def propositionalize(text: str) -> str:
    atom = re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")
    if not atom or not atom[0].isalpha():
        atom = f"s_{atom}" if atom else "s_"
    return atom


# ---------------------------------------------------------------------------
# Parsing


_SECTIONS = ("OPTIONS", "SCENARIOS", "STATEMENTS", "PREFERENCES")
_ENTRY_RE = re.compile(r"^([a-z][a-zA-Z0-9_]*)\s*:\s*(.*)$")
_STATEMENT_RE = re.compile(r"^if\s+([a-z]\w*)\s+then\s+([a-z]\w*)$")
_PREFERENCE_RE = re.compile(r"^([a-z]\w*)\s+over\s+([a-z]\w*)(?:\s+when\s+([a-z]\w*))?$")


def parse_policy(source: str) -> PolicyDocument:
    """Parse and validate a policy document.

    Raises ParseError on malformed syntax or fewer than two options,
    UnknownReferenceError on dangling ids, LevelMismatchError on
    ill-stratified preferences.
    """
    name = None
    section = None
    options: list[str] = []
    scenarios: dict[str, ScenarioDef] = {}
    statements: list[DecisionStatement] = []
    preferences: list[PreferenceStatement] = []
    current_scenario: str | None = None

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if name is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "policy":
                raise ParseError("expected 'policy <name>' header", line=lineno)
            name = parts[1]
            continue
        if line in _SECTIONS:
            section = line
            current_scenario = None
            continue
        if section is None:
            raise ParseError(f"expected a section header {_SECTIONS}", line=lineno)

        if section == "OPTIONS":
            if not re.fullmatch(r"[a-z][a-zA-Z0-9_]*", line):
                raise ParseError(f"invalid option name {line!r}", line=lineno)
            options.append(line)
            continue

        if section == "SCENARIOS":
            entry = _ENTRY_RE.match(line)
            if entry:
                sid, text = entry.group(1), entry.group(2).strip()
                if sid in scenarios:
                    raise ParseError(f"duplicate scenario id {sid!r}", line=lineno)
                if not text:
                    raise ParseError(f"scenario {sid!r} has empty text", line=lineno)
                scenarios[sid] = ScenarioDef(sid, text)
                current_scenario = sid
            elif line.startswith("when ") or line == "when":
                if current_scenario is None:
                    raise ParseError("'when' outside a scenario entry", line=lineno)
                literals = parse_condition_list(line[4:].strip(), line_offset=lineno)
                base = scenarios[current_scenario]
                scenarios[current_scenario] = ScenarioDef(
                    base.id, base.text, condition=literals, propositional=base.propositional
                )
            elif line == "propositional":
                if current_scenario is None:
                    raise ParseError("'propositional' outside a scenario entry", line=lineno)
                base = scenarios[current_scenario]
                scenarios[current_scenario] = ScenarioDef(
                    base.id, base.text, condition=base.condition, propositional=True
                )
            else:
                raise ParseError(f"cannot parse scenario line {line!r}", line=lineno)
            continue

        entry = _ENTRY_RE.match(line)
        if not entry:
            raise ParseError(f"expected '<id>: ...' in section {section}", line=lineno)
        eid, rest = entry.group(1), entry.group(2).strip()

        if section == "STATEMENTS":
            match = _STATEMENT_RE.match(rest)
            if not match:
                raise ParseError(
                    f"statement {eid!r} must read 'if <scenario> then <option>'", line=lineno
                )
            statements.append(DecisionStatement(eid, match.group(1), match.group(2)))
        else:
            match = _PREFERENCE_RE.match(rest)
            if not match:
                raise ParseError(
                    f"preference {eid!r} must read '<a> over <b> [when <scenario>]'",
                    line=lineno,
                )
            preferences.append(
                PreferenceStatement(eid, match.group(1), match.group(2), match.group(3))
            )

    if name is None:
        raise ParseError("empty policy: missing 'policy <name>' header")
    if len(options) < 2:
        raise ParseError(f"a policy needs at least two options, found {len(options)}")
    if len(set(options)) != len(options):
        raise ParseError("duplicate option names")

    ids = [s.id for s in statements] + [p.id for p in preferences]
    duplicates = {i for i in ids if ids.count(i) > 1}
    if duplicates:
        raise ParseError(f"duplicate statement/preference ids: {sorted(duplicates)}")

    doc = PolicyDocument(
        name=name,
        options=tuple(options),
        scenarios=scenarios,
        statements=tuple(statements),
        preferences=tuple(preferences),
    )
    _check_references(doc)
    doc.levels()
    return doc


def _check_references(doc: PolicyDocument) -> None:
    known = {s.id for s in doc.statements} | {p.id for p in doc.preferences}
    for statement in doc.statements:
        if statement.scenario not in doc.scenarios:
            raise UnknownReferenceError(
                f"statement {statement.id!r} uses undeclared scenario {statement.scenario!r}"
            )
        if statement.option not in doc.options:
            raise UnknownReferenceError(
                f"statement {statement.id!r} uses undeclared option {statement.option!r}"
            )
    for pref in doc.preferences:
        for target in (pref.stronger, pref.weaker):
            if target not in known:
                raise UnknownReferenceError(
                    f"preference {pref.id!r} references unknown id {target!r}"
                )
        if pref.stronger == pref.weaker:
            raise UnknownReferenceError(
                f"preference {pref.id!r} relates {pref.stronger!r} to itself"
            )
        if pref.context is not None and pref.context not in doc.scenarios:
            raise UnknownReferenceError(
                f"preference {pref.id!r} uses undeclared context scenario {pref.context!r}"
            )


# ---------------------------------------------------------------------------
# Compilation


_LEVEL_PREFIXES = {0: "r", 1: "p", 2: "c"}


def _label_prefix(level: int) -> str:
    return _LEVEL_PREFIXES.get(level, f"m{level}_")


def _scenario_conditions(doc, scenario_id, mode, refined_anywhere):
    scenario = doc.scenarios[scenario_id]
    if mode == "advanced" and scenario.condition is not None:
        return tuple(scenario.condition)
    if (
        mode == "advanced"
        and refined_anywhere
        and scenario.condition is None
        and not scenario.propositional
    ):
        raise MissingAdvancedConditionError(
            f"scenario {scenario_id!r} has no refinement; add a 'when' clause or "
            f"mark it 'propositional'"
        )
    return (DomainLit(scenario.atom),)


def compile_policy(doc: PolicyDocument, mode: str = "basic") -> Theory:
    """Deterministically compile a policy into a theory.

    Decision statements become level-0 rules labeled r1.. in declaration
    order; preferences become prefer rules labeled p1.. / c1.. at their
    level; complements are declared between every pair of distinct options.
    Basic mode conditions each rule on the scenario's propositional atom,
    advanced mode on its refinement literals.
    """
    if mode not in ("basic", "advanced"):
        raise ValueError(f"mode must be 'basic' or 'advanced', not {mode!r}")
    levels = doc.levels()
    refined_anywhere = any(s.condition is not None for s in doc.scenarios.values())

    counters: dict[int, int] = {}
    labels: dict[str, str] = {}
    for statement in doc.statements:
        counters[0] = counters.get(0, 0) + 1
        labels[statement.id] = f"{_label_prefix(0)}{counters[0]}"
    for pref in doc.preferences:
        level = levels[pref.id]
        counters[level] = counters.get(level, 0) + 1
        labels[pref.id] = f"{_label_prefix(level)}{counters[level]}"

    rules = []
    for statement in doc.statements:
        rules.append(
            RuleClause(
                label=labels[statement.id],
                head=DomainLit(statement.option),
                premises=(),
                conditions=_scenario_conditions(doc, statement.scenario, mode, refined_anywhere),
            )
        )
    for pref in doc.preferences:
        conditions = ()
        if pref.context is not None:
            conditions = _scenario_conditions(doc, pref.context, mode, refined_anywhere)
        rules.append(
            RuleClause(
                label=labels[pref.id],
                head=PreferLit(labels[pref.stronger], labels[pref.weaker]),
                premises=(),
                conditions=conditions,
            )
        )

    complements = [
        (DomainLit(a), DomainLit(b)) for a, b in itertools.combinations(doc.options, 2)
    ]
    theory = Theory(
        rules=tuple(rules),
        complements=normalize_complements(complements),
        abducibles=(),
    )
    validate_structure(theory.rules)
    theory_levels(theory)
    return theory


# ---------------------------------------------------------------------------
# Metadata


@dataclass(frozen=True)
class ScenarioElement:
    id: str
    kind: str  # 'propositional' | 'numeric'


@dataclass(frozen=True)
class ApplicationMetadata:
    options: tuple
    scenario_elements: tuple

    def element_ids(self) -> frozenset:
        return frozenset(e.id for e in self.scenario_elements)

    def to_json(self) -> dict:
        return {
            "options": list(self.options),
            "scenario_elements": [{"id": e.id, "kind": e.kind} for e in self.scenario_elements],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ApplicationMetadata":
        return cls(
            options=tuple(payload["options"]),
            scenario_elements=tuple(
                ScenarioElement(e["id"], e["kind"]) for e in payload["scenario_elements"]
            ),
        )


def metadata_of(theory: Theory) -> ApplicationMetadata:
    """Options and input vocabulary of a compiled theory.

    Options are the level-0 conclusions covered by a complement pair; the
    scenario elements are the body predicates no rule derives, which is
    exactly what a query context may supply.
    """
    elements = tuple(
        ScenarioElement(predicate, kind)
        for (predicate, _arity), kind in sorted(input_vocabulary(theory).items())
    )
    return ApplicationMetadata(options=options_of(theory), scenario_elements=elements)
