"""Speaker-turn timelines heard by each watch, and the context codes coders derive from them."""

from typing import List, Tuple

import numpy as np

from domain.models import ContextCode, Gender
from qa.annotation import AnnotationTrack, Segment
from qa.checks import ROMANTIC_PARTNER
from simulation.traces import StudyTraces

LOCATIONS = ("home", "garden", "car", "outside")
ACTIVITIES = ("eating", "chatting", "housework", "watching tv", "walking")
CONVERSATION_TYPES = ("everyday", "planning", "illness", "reminiscing")
MIN_SEGMENT_S = 0.25


def _turns(rng: np.random.Generator, speakers: List[str], lo: float, hi: float) -> List[Tuple[float, float, str]]:
    """Alternating turns of 2-8 s with short pauses, covering [lo, hi)."""
    out = []
    pos = lo + float(rng.uniform(0.0, 2.0))
    idx = int(rng.integers(len(speakers)))
    while pos < hi:
        length = float(rng.uniform(2.0, 8.0))
        end = min(hi, pos + length)
        out.append((pos, end, speakers[idx % len(speakers)]))
        idx += 1
        pos = end + float(rng.uniform(0.3, 1.5))
    return out


def minute_segments(traces: StudyTraces, minute: int, wearer: Gender, seed: int) -> List[Tuple[float, float, str]]:
    """Segments (absolute study seconds) a watch worn by ``wearer`` hears during ``minute``.

    When the partners are together both watches hear the same conversation, so
    the generator is keyed only by the couple and minute; apart, each watch
    hears its wearer alone.
    """
    lo, hi = minute * 60.0, (minute + 1) * 60.0
    together = traces.together(minute)
    key = [seed, traces.couple_id, minute, 0 if together else (1 if wearer is Gender.MALE else 2)]
    rng = np.random.default_rng(np.random.SeedSequence(key))
    male, female, other = traces.male_speaks[minute], traces.female_speaks[minute], traces.other_speaks[minute]
    if together:
        speakers = [s for s, on in (("m", male), ("f", female)) if on]
    else:
        own = male if wearer is Gender.MALE else female
        speakers = [wearer.speaker] if own else []
    segments = _turns(rng, speakers, lo, hi) if speakers else []
    if other or (speakers and not together):
        start = float(rng.uniform(lo, hi - 5.0))
        segments.append((start, start + float(rng.uniform(2.0, 5.0)), "u"))
    if not segments and rng.random() < 0.3:
        segments.append((lo, hi, "n"))
    return segments


def session_annotation(
    traces: StudyTraces,
    wearer: Gender,
    start_s: float,
    duration_s: float,
    seed: int,
) -> AnnotationTrack:
    """Turns inside [start_s, start_s + duration_s), re-based to the session start."""
    end_s = start_s + duration_s
    first = int(np.floor(start_s / 60.0))
    last = int(np.ceil(end_s / 60.0))
    segments = []
    for minute in range(first, min(last, traces.distance_m.shape[0])):
        for lo, hi, label in minute_segments(traces, minute, wearer, seed):
            lo, hi = max(lo, start_s) - start_s, min(hi, end_s) - start_s
            if hi - lo >= MIN_SEGMENT_S:
                segments.append(Segment(round(lo, 3), round(hi, 3), label))
    segments.sort(key=lambda s: (s.start, s.end, s.label))
    return AnnotationTrack(tuple(segments))


def code_from_annotation(session_id: str, annotation: AnnotationTrack, rng: np.random.Generator) -> ContextCode:
    labels = set(annotation.labels())
    male, female = "m" in labels, "f" in labels
    speech = bool(labels & {"m", "f", "u"})
    if male and female:
        partner = ROMANTIC_PARTNER
    elif "u" in labels:
        partner = "other"
    else:
        partner = "none"
    return ContextCode(
        session_id=session_id,
        speech_present=speech,
        male_spoke=male,
        female_spoke=female,
        conversation=speech and len(labels & {"m", "f", "u"}) >= 2,
        partner_conversation=male and female,
        interaction_partner=partner,
        location=LOCATIONS[int(rng.integers(len(LOCATIONS)))],
        activity=ACTIVITIES[int(rng.integers(len(ACTIVITIES)))],
        conversation_type=CONVERSATION_TYPES[int(rng.integers(len(CONVERSATION_TYPES)))] if speech else "",
    )
