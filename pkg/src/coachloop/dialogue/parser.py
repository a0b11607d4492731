"""Line-based recursive-descent parser for the dialogue scripting DSL.

Grammar (one construct per line, '#' and '||' lines are comments):

    concept: ~name( word word ... )
    Topic: ~name( keyword ~concept ... )
    t: [LABEL] [( pattern )] response text
    ?: [LABEL] ( pattern ) response text
    s: [LABEL] ( pattern ) response text
      a: ( pattern ) response text

Pattern elements: word, ~concept, *, _name (one-token capture),
_~concept (concept-member capture); '<< ... >>' marks an unordered pattern.

A ~concept named in a topic's keyword list without an explicit definition
is implicitly defined with the topic's plain keywords as members. Concepts
referenced only inside patterns and never defined resolve at match time to
the singleton of their own name; with ``strict_concepts=True`` they are
parse errors instead.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .script import (
    DialogueScript,
    ElementKind,
    Pattern,
    PatternElement,
    Rejoinder,
    Rule,
    RuleKind,
    Topic,
)


class ScriptSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_CONCEPT_RE = re.compile(r"^concept:\s*~\s*(\w+)\s*\((.*)\)\s*$")
_TOPIC_RE = re.compile(r"^Topic:\s*~\s*(\w+)\s*\((.*)\)\s*$", re.IGNORECASE)
_LABEL_RE = re.compile(r"^[A-Z][A-Z0-9_]+$")


def _tokenize_pattern(inner: str, line: int) -> Pattern:
    raw = inner.split()
    unordered = False
    if raw and raw[0] == "<<":
        if not raw or raw[-1] != ">>":
            raise ScriptSyntaxError("'<<' without matching '>>'", line)
        unordered = True
        raw = raw[1:-1]
    elif ">>" in raw or "<<" in raw:
        raise ScriptSyntaxError("misplaced '<<' or '>>' in pattern", line)

    # tolerate a space between the marker and the name: "~ fruit", "_~ x"
    joined: List[str] = []
    i = 0
    while i < len(raw):
        tok = raw[i]
        if tok in ("~", "_~") and i + 1 < len(raw):
            joined.append(tok + raw[i + 1])
            i += 2
        else:
            joined.append(tok)
            i += 1

    elements: List[PatternElement] = []
    for tok in joined:
        if tok == "*":
            elements.append(PatternElement(ElementKind.WILDCARD))
        elif tok.startswith("_~"):
            elements.append(
                PatternElement(ElementKind.CAPTURE_CONCEPT, tok[2:].lower())
            )
        elif tok.startswith("_"):
            elements.append(PatternElement(ElementKind.CAPTURE_ANY, tok[1:].lower()))
        elif tok.startswith("~"):
            elements.append(PatternElement(ElementKind.CONCEPT, tok[1:].lower()))
        else:
            elements.append(PatternElement(ElementKind.WORD, tok.lower()))
    if not elements:
        raise ScriptSyntaxError("empty pattern", line)
    if unordered and any(e.kind == ElementKind.WILDCARD for e in elements):
        raise ScriptSyntaxError("unordered pattern may not contain '*'", line)
    return Pattern(elements=tuple(elements), unordered=unordered)


def _parse_rule_body(
    body: str, line: int
) -> Tuple[Optional[str], Optional[Pattern], str]:
    """Split '[LABEL] [( pattern )] text' into its parts."""
    body = body.strip()
    label = None
    first = body.split(None, 1)
    if first and _LABEL_RE.match(first[0]):
        label = first[0]
        body = first[1].strip() if len(first) > 1 else ""
    pattern = None
    if body.startswith("("):
        close = body.find(")")
        if close < 0:
            raise ScriptSyntaxError("unbalanced '(' in pattern", line)
        # '>>' may sit flush against the close paren: "( << a b >>)"
        inner = body[1:close].replace(">>", " >> ").replace("<<", " << ")
        pattern = _tokenize_pattern(inner, line)
        body = body[close + 1 :].strip()
    return label, pattern, body


def parse_script(source: str, *, strict_concepts: bool = False) -> DialogueScript:
    if not source.strip():
        raise ScriptSyntaxError("empty script", 1)

    concepts: Dict[str, Tuple[str, ...]] = {}
    topics: List[Topic] = []
    current_topic: Optional[Topic] = None
    current_rule: Optional[Rule] = None
    concept_refs: List[Tuple[str, int]] = []

    for lineno, raw_line in enumerate(source.splitlines(), 1):
        line = raw_line.strip()
        if not line or line.startswith("#") or line.startswith("||"):
            continue

        if line.lower().startswith("concept:"):
            m = _CONCEPT_RE.match(line)
            if not m:
                raise ScriptSyntaxError("malformed concept definition", lineno)
            name = m.group(1).lower()
            members = tuple(w.lower() for w in m.group(2).split())
            if not members:
                raise ScriptSyntaxError(f"concept ~{name} has no members", lineno)
            if name in concepts:
                raise ScriptSyntaxError(f"duplicate concept ~{name}", lineno)
            concepts[name] = members
            continue

        if line.lower().startswith("topic:"):
            m = _TOPIC_RE.match(line)
            if not m:
                raise ScriptSyntaxError("malformed topic header", lineno)
            name = m.group(1).lower()
            if any(t.name == name for t in topics):
                raise ScriptSyntaxError(f"duplicate topic ~{name}", lineno)
            keywords = []
            toks = m.group(2).split()
            i = 0
            while i < len(toks):
                if toks[i] == "~" and i + 1 < len(toks):
                    keywords.append("~" + toks[i + 1].lower())
                    i += 2
                else:
                    keywords.append(toks[i].lower())
                    i += 1
            if current_topic is not None and not current_topic.rules:
                raise ScriptSyntaxError(
                    f"topic ~{current_topic.name} has no rules", lineno
                )
            current_topic = Topic(name=name, keywords=tuple(keywords))
            topics.append(current_topic)
            current_rule = None
            # a ~concept listed in the keywords with no explicit definition is
            # implicitly defined by the topic's plain keywords
            plain = tuple(k for k in keywords if not k.startswith("~"))
            for kw in keywords:
                if kw.startswith("~") and kw[1:] not in concepts:
                    if not plain:
                        raise ScriptSyntaxError(
                            f"cannot imply concept {kw}: no plain keywords", lineno
                        )
                    concepts[kw[1:]] = plain
            continue

        kind = None
        for candidate in (RuleKind.GAMBIT, RuleKind.QUESTION, RuleKind.STATEMENT):
            if line.startswith(candidate.value):
                kind = candidate
                break
        if kind is not None:
            if current_topic is None:
                raise ScriptSyntaxError("rule outside of any topic", lineno)
            label, pattern, output = _parse_rule_body(line[2:], lineno)
            if kind != RuleKind.GAMBIT and pattern is None:
                raise ScriptSyntaxError(
                    f"responder '{kind.value}' requires a pattern", lineno
                )
            if not output and pattern is None:
                raise ScriptSyntaxError("rule has no response text", lineno)
            if pattern is not None:
                concept_refs.extend((n, lineno) for n in pattern.concept_refs())
            current_rule = Rule(kind=kind, label=label, pattern=pattern, output=output)
            current_topic.rules.append(current_rule)
            continue

        if line.startswith("a:"):
            if current_rule is None:
                raise ScriptSyntaxError("rejoinder 'a:' without a preceding rule", lineno)
            _, pattern, output = _parse_rule_body(line[2:], lineno)
            if pattern is None:
                raise ScriptSyntaxError("rejoinder requires a pattern", lineno)
            concept_refs.extend((n, lineno) for n in pattern.concept_refs())
            current_rule.rejoinders.append(Rejoinder(pattern=pattern, output=output))
            continue

        raise ScriptSyntaxError(f"unrecognized line: {line[:40]!r}", lineno)

    if not topics:
        raise ScriptSyntaxError("script defines no topics", 1)
    if current_topic is not None and not current_topic.rules:
        raise ScriptSyntaxError(
            f"topic ~{current_topic.name} has no rules", lineno
        )
    if strict_concepts:
        for name, ref_line in concept_refs:
            if name not in concepts:
                raise ScriptSyntaxError(f"undefined concept ~{name}", ref_line)

    return DialogueScript(topics=topics, concepts=concepts)
