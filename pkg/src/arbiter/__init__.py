"""Preference-based argumentation decision engine.

Parse or compile a theory, ground it against a query context, and ask which
options are acceptable:

    >>> from arbiter import parse_theory, QueryContext, decide
    >>> theory = parse_theory(open("salary.grg").read())
    >>> ctx = QueryContext.make(bindings={"offered_salary": 70000,
    ...                                   "expected_salary": 80000})
    >>> decide(theory, ctx).acceptable_options
    ('refuse',)
"""

from .analysis import level_of, max_level, options_of, validate_theory
from .engine import (
    Argument,
    DecisionResult,
    PriorityRelation,
    acceptable_options,
    build_arguments,
    conflicts,
    decide,
    decide_with_abduction,
    strict_priorities,
)
from .errors import ArbiterError, Diagnostic, ParseError
from .explain import Explanation, explain, explanation_to_json, render_text, replay
from .grounding import GroundRule, QueryContext, eval_builtin, ground_theory
from .language import Theory, render_theory
from .oracle import OracleVerdict, brute_force_acceptable
from .parser import parse_theory
from .policy import (
    ApplicationMetadata,
    PolicyDocument,
    compile_policy,
    metadata_of,
    parse_policy,
)

__all__ = [
    "ApplicationMetadata",
    "ArbiterError",
    "Argument",
    "DecisionResult",
    "Diagnostic",
    "Explanation",
    "GroundRule",
    "OracleVerdict",
    "ParseError",
    "PolicyDocument",
    "PriorityRelation",
    "QueryContext",
    "Theory",
    "acceptable_options",
    "brute_force_acceptable",
    "build_arguments",
    "compile_policy",
    "conflicts",
    "decide",
    "decide_with_abduction",
    "eval_builtin",
    "explain",
    "explanation_to_json",
    "ground_theory",
    "level_of",
    "max_level",
    "metadata_of",
    "options_of",
    "parse_policy",
    "parse_theory",
    "render_text",
    "render_theory",
    "replay",
    "strict_priorities",
    "validate_theory",
]

__version__ = "0.1.0"
