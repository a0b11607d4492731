from .script import (
    DialogueScript,
    ElementKind,
    Pattern,
    PatternElement,
    Rejoinder,
    Rule,
    RuleKind,
    Topic,
    pretty_print,
)
from .parser import ScriptSyntaxError, parse_script
from .matcher import MatchResult, match, tokenize
from .session import (
    FALLBACK_LINE,
    IntakeResult,
    Phase,
    Session,
    advance,
    feedback_summary,
    intake_to_profile,
    volunteer_gambit,
)

__all__ = [
    "DialogueScript",
    "ElementKind",
    "Pattern",
    "PatternElement",
    "Rejoinder",
    "Rule",
    "RuleKind",
    "Topic",
    "pretty_print",
    "ScriptSyntaxError",
    "parse_script",
    "MatchResult",
    "match",
    "tokenize",
    "FALLBACK_LINE",
    "IntakeResult",
    "Phase",
    "Session",
    "advance",
    "feedback_summary",
    "intake_to_profile",
    "volunteer_gambit",
]
