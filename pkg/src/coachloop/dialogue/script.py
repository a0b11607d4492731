"""Dialogue script structure: topics, rules, patterns, concept sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple


class RuleKind(str, Enum):
    GAMBIT = "t:"
    QUESTION = "?:"
    STATEMENT = "s:"


class ElementKind(str, Enum):
    WORD = "WORD"
    CONCEPT = "CONCEPT"
    WILDCARD = "WILDCARD"
    CAPTURE_ANY = "CAPTURE_ANY"  # _name, binds exactly one token
    CAPTURE_CONCEPT = "CAPTURE_CONCEPT"  # _~name, binds a concept member


@dataclass(frozen=True)
class PatternElement:
    kind: ElementKind
    value: str = ""

    def render(self) -> str:
        if self.kind == ElementKind.WORD:
            return self.value
        if self.kind == ElementKind.CONCEPT:
            return f"~{self.value}"
        if self.kind == ElementKind.WILDCARD:
            return "*"
        if self.kind == ElementKind.CAPTURE_ANY:
            return f"_{self.value}"
        return f"_~{self.value}"


@dataclass(frozen=True)
class Pattern:
    elements: Tuple[PatternElement, ...]
    unordered: bool = False

    def render(self) -> str:
        inner = " ".join(el.render() for el in self.elements)
        if self.unordered:
            return f"( << {inner} >> )"
        return f"( {inner} )"

    def concept_refs(self) -> List[str]:
        return [
            el.value
            for el in self.elements
            if el.kind in (ElementKind.CONCEPT, ElementKind.CAPTURE_CONCEPT)
        ]


@dataclass(frozen=True)
class Rejoinder:
    pattern: Pattern
    output: str


@dataclass
class Rule:
    kind: RuleKind
    label: Optional[str] = None
    pattern: Optional[Pattern] = None
    output: str = ""
    rejoinders: List[Rejoinder] = field(default_factory=list)

    @property
    def is_gambit(self) -> bool:
        return self.kind == RuleKind.GAMBIT

    @property
    def is_responder(self) -> bool:
        return self.kind in (RuleKind.QUESTION, RuleKind.STATEMENT)


@dataclass
class Topic:
    name: str
    keywords: Tuple[str, ...] = ()
    rules: List[Rule] = field(default_factory=list)

    def gambits(self) -> List[Tuple[int, Rule]]:
        return [(i, r) for i, r in enumerate(self.rules) if r.is_gambit]

    def responders(self) -> List[Tuple[int, Rule]]:
        return [(i, r) for i, r in enumerate(self.rules) if r.is_responder]


@dataclass
class DialogueScript:
    topics: List[Topic]
    concepts: Dict[str, Tuple[str, ...]]

    def topic(self, name: str) -> Topic:
        for t in self.topics:
            if t.name == name:
                return t
        raise KeyError(f"unknown topic: {name}")


def pretty_print(script: DialogueScript) -> str:
    """Render a script back to canonical source text; parsing the output
    yields an identical structure."""
    lines: List[str] = []
    for name, members in script.concepts.items():
        lines.append(f"concept: ~{name}( {' '.join(members)} )")
    if script.concepts:
        lines.append("")
    for topic in script.topics:
        lines.append(f"Topic: ~{topic.name}( {' '.join(topic.keywords)} )")
        for rule in topic.rules:
            parts = [rule.kind.value]
            if rule.label:
                parts.append(rule.label)
            if rule.pattern is not None:
                parts.append(rule.pattern.render())
            parts.append(rule.output)
            lines.append(" ".join(parts))
            for rej in rule.rejoinders:
                lines.append(f"  a: {rej.pattern.render()} {rej.output}")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
