"""Pattern matching over tokenized user input.

Ordered patterns require their elements on consecutive tokens, starting at
any position; '*' spans zero or more tokens with leftmost-shortest
preference and no further backtracking. Unordered patterns ('<< >>') just
require every element to occur somewhere. Matching is deterministic;
non-match is a result, not an error.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

from .script import ElementKind, Pattern, PatternElement

_PUNCT = set(string.punctuation)
_NUMERIC = re.compile(r"^[+-]?\d+(?:\.\d+)?$")


def tokenize(text: str) -> List[str]:
    """Lowercase, strip ASCII punctuation, split on whitespace. Numeric
    tokens keep their sign and decimal point."""
    out: List[str] = []
    for raw in text.lower().split():
        trimmed = raw.rstrip(".,!?;:")
        if _NUMERIC.match(trimmed):
            out.append(trimmed)
            continue
        cleaned = "".join(ch for ch in raw if ch not in _PUNCT)
        if cleaned:
            out.append(cleaned)
    return out


@dataclass
class MatchResult:
    matched: bool
    captures: Dict[str, str] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.matched


def _members(concepts: Mapping[str, Sequence[str]], name: str) -> Tuple[str, ...]:
    # an undefined concept matches its own name only
    return tuple(concepts.get(name, (name,)))


def _element_accepts(
    el: PatternElement, token: str, concepts: Mapping[str, Sequence[str]]
) -> bool:
    if el.kind == ElementKind.WORD:
        return token == el.value
    if el.kind == ElementKind.CONCEPT:
        return token in _members(concepts, el.value)
    if el.kind == ElementKind.CAPTURE_ANY:
        return True
    if el.kind == ElementKind.CAPTURE_CONCEPT:
        return token in _members(concepts, el.value)
    return False


def _capture_name(el: PatternElement) -> str | None:
    if el.kind in (ElementKind.CAPTURE_ANY, ElementKind.CAPTURE_CONCEPT):
        return el.value
    return None


def _match_ordered(
    elements: Sequence[PatternElement],
    ei: int,
    tokens: Sequence[str],
    ti: int,
    concepts: Mapping[str, Sequence[str]],
    captures: Dict[str, str],
) -> bool:
    if ei == len(elements):
        return True
    el = elements[ei]
    if el.kind == ElementKind.WILDCARD:
        for skip in range(len(tokens) - ti + 1):  # shortest span first
            if _match_ordered(elements, ei + 1, tokens, ti + skip, concepts, captures):
                return True
        return False
    if ti >= len(tokens):
        return False
    token = tokens[ti]
    if not _element_accepts(el, token, concepts):
        return False
    name = _capture_name(el)
    had = name in captures if name else False
    old = captures.get(name) if had else None
    if name:
        captures[name] = token
    if _match_ordered(elements, ei + 1, tokens, ti + 1, concepts, captures):
        return True
    if name:
        if had:
            captures[name] = old  # type: ignore[assignment]
        else:
            del captures[name]
    return False


def match(
    pattern: Pattern,
    text_or_tokens,
    concepts: Mapping[str, Sequence[str]],
) -> MatchResult:
    tokens = (
        tokenize(text_or_tokens)
        if isinstance(text_or_tokens, str)
        else list(text_or_tokens)
    )
    if pattern.unordered:
        captures: Dict[str, str] = {}
        for el in pattern.elements:
            found = None
            for token in tokens:
                if _element_accepts(el, token, concepts):
                    found = token
                    break
            if found is None:
                return MatchResult(False)
            name = _capture_name(el)
            if name and name not in captures:
                captures[name] = found
        return MatchResult(True, captures)

    for start in range(len(tokens) + 1):
        captures = {}
        if _match_ordered(pattern.elements, 0, tokens, start, concepts, captures):
            return MatchResult(True, captures)
    return MatchResult(False)
