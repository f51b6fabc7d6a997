"""Minute-resolution daily-life traces for one couple: proximity, who speaks, latent emotion, activity."""

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from domain.config_models import BehaviourParams
from domain.models import Gender

MINUTES_PER_DAY = 24 * 60
# Extra minutes after the last day so recordings that start late still have traces.
TAIL_MINUTES = 60
TOGETHER_MAX_M = 4.0
STAY_TOGETHER = 0.95
STAY_TALKING = 0.8
BOTH_TALK_SHARE = 0.7
OTHER_SPEAKER_PROB = 0.1


@dataclass(frozen=True)
class LatentEmotionProcess:
    """Bounded mean-reverting random walk with occasional spikes, clamped to [0, 100]."""

    center: float
    step_sd: float = 2.0
    drift: float = 0.05
    spike_prob: float = 0.01
    spike_sd: float = 20.0

    def walk(self, n: int, rng: np.random.Generator, start: Optional[float] = None) -> np.ndarray:
        steps = rng.normal(0.0, self.step_sd, n)
        spikes = np.where(rng.random(n) < self.spike_prob, rng.normal(0.0, self.spike_sd, n), 0.0)
        out = np.empty(n)
        value = self.center if start is None else start
        for i in range(n):
            value = value + self.drift * (self.center - value) + steps[i] + spikes[i]
            value = min(100.0, max(0.0, value))
            out[i] = value
        return out


@dataclass(frozen=True, eq=False)
class HourTraces:
    """One hour (60 minutes) of a couple's traces; arrays are indexed by minute."""

    distance_m: np.ndarray
    male_speaks: np.ndarray
    female_speaks: np.ndarray
    other_speaks: np.ndarray

    def speech(self, minute: int) -> bool:
        return bool(self.male_speaks[minute] or self.female_speaks[minute] or self.other_speaks[minute])

    @classmethod
    def constant(cls, distance_m: float, speaking_minutes=(), both: bool = True) -> "HourTraces":
        """Fixed distance for the hour with speech only in ``speaking_minutes``."""
        talk = np.zeros(60, dtype=bool)
        talk[list(speaking_minutes)] = True
        silent = np.zeros(60, dtype=bool)
        return cls(np.full(60, float(distance_m)), talk.copy(), talk.copy() if both else silent.copy(), silent)


@dataclass(frozen=True, eq=False)
class StudyTraces:
    couple_id: int
    distance_m: np.ndarray
    male_speaks: np.ndarray
    female_speaks: np.ndarray
    other_speaks: np.ndarray
    valence: Dict[Gender, np.ndarray]
    arousal: Dict[Gender, np.ndarray]
    activity: Dict[Gender, np.ndarray]

    def together(self, minute: int) -> bool:
        return bool(self.distance_m[minute] <= TOGETHER_MAX_M)

    def hour(self, day_index: int, hour: int) -> HourTraces:
        lo = day_index * MINUTES_PER_DAY + hour * 60
        hi = lo + 60
        return HourTraces(
            self.distance_m[lo:hi],
            self.male_speaks[lo:hi],
            self.female_speaks[lo:hi],
            self.other_speaks[lo:hi],
        )

    def session_mean(self, series: Dict[Gender, np.ndarray], gender: Gender, start_min: float, dur_s: float) -> float:
        lo = int(np.floor(start_min))
        hi = max(lo + 1, int(np.ceil(start_min + dur_s / 60.0)))
        return float(series[gender][lo:hi].mean())


def _markov_chain(n: int, stationary: float, stay: float, rng: np.random.Generator) -> np.ndarray:
    """Two-state chain with the given stationary probability of being on."""
    stationary = min(max(stationary, 1e-6), 1 - 1e-6)
    enter = min(1.0, (1 - stay) * stationary / (1 - stationary))
    u = rng.random(n)
    on = np.empty(n, dtype=bool)
    state = rng.random() < stationary
    for i in range(n):
        state = (u[i] < stay) if state else (u[i] < enter)
        on[i] = state
    return on


def simulate_traces(
    couple_id: int,
    days: int,
    behaviour: BehaviourParams,
    centers: Dict[Gender, tuple],
    rng: np.random.Generator,
) -> StudyTraces:
    """``centers`` maps gender to its (valence, arousal) walk centres."""
    n = days * MINUTES_PER_DAY + TAIL_MINUTES
    together = _markov_chain(n, behaviour.together_prob, STAY_TOGETHER, rng)
    distance = np.where(together, rng.uniform(0.5, TOGETHER_MAX_M, n), rng.uniform(10.0, 60.0, n))

    talking = _markov_chain(n, behaviour.talk_prob, STAY_TALKING, rng)
    who = rng.random(n)
    single_male = rng.random(n) < 0.5
    both = who < BOTH_TALK_SHARE
    male = talking & (both | single_male)
    female = talking & (both | ~single_male)
    other = rng.random(n) < OTHER_SPEAKER_PROB

    valence, arousal, activity = {}, {}, {}
    for gender in (Gender.MALE, Gender.FEMALE):
        v_center, a_center = centers[gender]
        kw = dict(
            step_sd=behaviour.latent_step_sd,
            drift=behaviour.latent_drift,
            spike_prob=behaviour.latent_spike_prob,
            spike_sd=behaviour.latent_spike_sd,
        )
        valence[gender] = LatentEmotionProcess(v_center, **kw).walk(n, rng)
        arousal[gender] = LatentEmotionProcess(a_center, **kw).walk(n, rng)
        act = np.empty(n)
        level = 0.3
        noise = rng.normal(0.0, 0.08, n)
        for i in range(n):
            level = min(1.0, max(0.0, level + 0.1 * (0.3 - level) + noise[i]))
            act[i] = level
        activity[gender] = act
    return StudyTraces(couple_id, distance, male, female, other, valence, arousal, activity)
