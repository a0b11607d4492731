"""Per-patient conversation state and the turn-taking engine.

A session moves through two scripted phases: intake (information gathering,
fills profile fields) and activity feedback collection. Between them it is
IDLE and the bot just chats over the loaded topics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from .matcher import match, tokenize
from .script import DialogueScript, Rule, Topic

FALLBACK_LINE = "I am not sure I follow, but I am listening."

INTAKE_TOPIC = "intake"
FEEDBACK_TOPIC = "activity_feedback"

# capture name -> profile field populated during intake
INTAKE_CAPTURE_FIELDS = {
    "age": "age",
    "bmi": "bmi",
    "diet_types": "diet_score",
    "sleep_hours": "sleep_hours",
    "activity": "activity_level",
    "profession": "profession_label",
}
# profile field -> gambit label to repeat when the answer is out of range
INTAKE_FIELD_GAMBITS = {
    "age": "ASKAGE",
    "bmi": "ASKBMI",
    "diet_score": "ASKDIET",
    "sleep_hours": "ASKSLEEP",
    "activity_level": "ASKACTIVITY",
    "profession_label": "ASKPROFESSION",
}

DEFAULT_DIET_SCORES = {
    "healthy": 0.9,
    "balanced": 0.8,
    "vegetarian": 0.75,
    "vegan": 0.7,
    "mixed": 0.5,
    "irregular": 0.35,
    "junk": 0.2,
    "fast": 0.2,
    "unhealthy": 0.1,
}


class Phase(str, Enum):
    INTAKE = "INTAKE"
    FEEDBACK = "FEEDBACK"
    IDLE = "IDLE"


_ALLOWED_TRANSITIONS = {
    (Phase.INTAKE, Phase.IDLE),
    (Phase.IDLE, Phase.FEEDBACK),
    (Phase.FEEDBACK, Phase.IDLE),
}


@dataclass
class Session:
    patient_id: str
    phase: Phase = Phase.INTAKE
    current_topic: str = INTAKE_TOPIC
    pending_gambit: Optional[Tuple[str, int]] = None  # (topic, rule index)
    fired_gambits: Set[Tuple[str, int]] = field(default_factory=set)
    captures: Dict[str, str] = field(default_factory=dict)
    transcript: List[Tuple[str, str, float]] = field(default_factory=list)
    intake_answers: Dict[str, object] = field(default_factory=dict)

    def set_phase(self, new_phase: Phase) -> None:
        if new_phase == self.phase:
            return
        if (self.phase, new_phase) not in _ALLOWED_TRANSITIONS:
            raise ValueError(f"illegal phase transition {self.phase} -> {new_phase}")
        self.phase = new_phase

    def reset_topic(self, topic_name: str) -> None:
        """Point the session at a topic with its gambits unfired."""
        self.current_topic = topic_name
        self.pending_gambit = None
        self.fired_gambits = {
            fg for fg in self.fired_gambits if fg[0] != topic_name
        }

    def to_dict(self) -> dict:
        return {
            "patient_id": self.patient_id,
            "phase": self.phase.value,
            "current_topic": self.current_topic,
            "pending_gambit": list(self.pending_gambit) if self.pending_gambit else None,
            "fired_gambits": sorted([list(fg) for fg in self.fired_gambits]),
            "captures": dict(self.captures),
            "transcript": [list(t) for t in self.transcript],
            "intake_answers": dict(self.intake_answers),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        return cls(
            patient_id=d["patient_id"],
            phase=Phase(d["phase"]),
            current_topic=d["current_topic"],
            pending_gambit=tuple(d["pending_gambit"]) if d.get("pending_gambit") else None,
            fired_gambits={(t, i) for t, i in d.get("fired_gambits", [])},
            captures=dict(d.get("captures", {})),
            transcript=[tuple(t) for t in d.get("transcript", [])],
            intake_answers=dict(d.get("intake_answers", {})),
        )


def _next_unfired_gambit(session: Session, topic: Topic) -> Optional[Tuple[int, Rule]]:
    for idx, rule in topic.gambits():
        if (topic.name, idx) not in session.fired_gambits:
            return idx, rule
    return None


def volunteer_gambit(session: Session, script: DialogueScript, now: float = 0.0) -> Optional[str]:
    """Fire the next unfired gambit of the current topic, if any. The gambit
    text extends the last bot transcript line (or opens the transcript)."""
    try:
        topic = script.topic(session.current_topic)
    except KeyError:
        return None
    nxt = _next_unfired_gambit(session, topic)
    if nxt is None:
        return None
    idx, rule = nxt
    session.fired_gambits.add((topic.name, idx))
    session.pending_gambit = (topic.name, idx)
    if session.transcript and session.transcript[-1][0] == "bot":
        speaker, text, ts = session.transcript[-1]
        session.transcript[-1] = (speaker, f"{text} {rule.output}", ts)
    else:
        session.transcript.append(("bot", rule.output, now))
    return rule.output


def advance(
    session: Session,
    user_text: str,
    script: DialogueScript,
    now: float = 0.0,
) -> str:
    """Process one user turn and return the bot response.

    Resolution order: pending gambit rejoinders, current topic responders,
    other topics' responders (switching topic on match), next unfired gambit
    of the current topic, fixed fallback line.
    """
    session.transcript.append(("user", user_text, now))
    tokens = tokenize(user_text)
    response: Optional[str] = None

    # 1. rejoinders of the gambit that just fired
    if session.pending_gambit is not None:
        topic_name, idx = session.pending_gambit
        rule = script.topic(topic_name).rules[idx]
        for rej in rule.rejoinders:
            result = match(rej.pattern, tokens, script.concepts)
            if result:
                session.captures.update(result.captures)
                response = rej.output
                break
        session.pending_gambit = None

    # 2. current topic responders, then 3. other topics in script order
    if response is None:
        ordered_topics = [script.topic(session.current_topic)] + [
            t for t in script.topics if t.name != session.current_topic
        ]
        for topic in ordered_topics:
            for _, rule in topic.responders():
                result = match(rule.pattern, tokens, script.concepts)
                if result:
                    session.captures.update(result.captures)
                    session.current_topic = topic.name
                    response = rule.output
                    break
            if response is not None:
                break

    # 4. volunteer the next gambit, else 5. fixed fallback
    if response is None:
        topic = script.topic(session.current_topic)
        nxt = _next_unfired_gambit(session, topic)
        if nxt is not None:
            idx, rule = nxt
            session.fired_gambits.add((topic.name, idx))
            session.pending_gambit = (topic.name, idx)
            response = rule.output
        else:
            response = FALLBACK_LINE

    session.transcript.append(("bot", response, now))
    if session.phase == Phase.INTAKE:
        for name, value in session.captures.items():
            if name in INTAKE_CAPTURE_FIELDS:
                session.intake_answers[name] = value
    return response


@dataclass
class IntakeResult:
    updates: Dict[str, object]
    reask: List[str]  # profile fields whose answers were out of range

    @property
    def complete(self) -> bool:
        return set(self.updates) >= set(INTAKE_FIELD_GAMBITS)


def _parse_number(text: str) -> Optional[float]:
    try:
        return float(text)
    except (TypeError, ValueError):
        return None


def intake_to_profile(
    session: Session,
    diet_scores: Optional[Dict[str, float]] = None,
) -> IntakeResult:
    """Validate captured intake answers into profile field updates. An
    out-of-range answer queues the field for a repeat gambit instead of
    failing."""
    if session.phase != Phase.INTAKE:
        raise ValueError("intake_to_profile requires an INTAKE-phase session")
    diet_scores = diet_scores or DEFAULT_DIET_SCORES
    updates: Dict[str, object] = {}
    reask: List[str] = []

    def numeric(capture: str, fieldname: str, lo: float, hi: float, scale: float = 1.0):
        if capture not in session.captures:
            return
        value = _parse_number(session.captures[capture])
        if value is None or not lo <= value <= hi:
            reask.append(fieldname)
        else:
            updates[fieldname] = value * scale

    numeric("age", "age", 1, 120)
    numeric("bmi", "bmi", 5, 100)
    numeric("sleep_hours", "sleep_hours", 0, 24)
    numeric("activity", "activity_level", 0, 10, scale=0.1)
    if "diet_types" in session.captures:
        word = session.captures["diet_types"]
        if word in diet_scores:
            updates["diet_score"] = diet_scores[word]
        else:
            reask.append("diet_score")
    if "profession" in session.captures:
        label = session.captures["profession"].strip()
        if label:
            updates["profession_label"] = label
        else:
            reask.append("profession_label")
    return IntakeResult(updates=updates, reask=reask)


@dataclass
class FeedbackResult:
    completed: bool
    motivation_rating: Optional[int]
    feedback_text: Optional[str]


def feedback_summary(session: Session) -> Optional[FeedbackResult]:
    """Return the collected feedback once the feedback conversation is done,
    else None. Invalid motivation ratings leave the summary incomplete so
    the service can repeat the question."""
    if "yes_words" in session.captures:
        completed = True
    elif "no_words" in session.captures:
        completed = False
    else:
        return None
    rating = None
    if "rating" in session.captures:
        value = _parse_number(session.captures["rating"])
        if value is not None and value == int(value) and 1 <= value <= 5:
            rating = int(value)
    if rating is None:
        return None
    if "comment" not in session.captures:
        return None
    # the free-text comment is the user's final transcript line
    text = None
    for speaker, line, _ in reversed(session.transcript):
        if speaker == "user":
            text = line
            break
    return FeedbackResult(completed=completed, motivation_rating=rating, feedback_text=text)


def clear_feedback_captures(session: Session) -> None:
    for name in ("yes_words", "no_words", "rating", "comment"):
        session.captures.pop(name, None)
