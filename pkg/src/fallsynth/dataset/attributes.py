"""Closed attribute vocabularies for the three-phase falling score.

Each sequence carries one label per conditioning slot: where the impact
lands, how it reads (impact quality), the character of the glitch, and the
character of the descent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

IMPACT_LOCATIONS = ("head", "torso", "arms", "legs")
IMPACT_QUALITIES = ("push", "prick", "shot", "contraction", "explosion")
GLITCH_QUALITIES = ("shake", "flail", "flash", "stutter", "contort", "stumble", "spin", "freeze")
FALL_QUALITIES = ("release", "let_go", "hinge", "surrender", "suspend")

VOCABULARIES = {
    "impact_location": IMPACT_LOCATIONS,
    "impact_quality": IMPACT_QUALITIES,
    "glitch_quality": GLITCH_QUALITIES,
    "fall_quality": FALL_QUALITIES,
}

NUM_IMPACT_CLASSES = len(IMPACT_LOCATIONS) * len(IMPACT_QUALITIES)  # joint location x quality
NUM_GLITCH_CLASSES = len(GLITCH_QUALITIES)
NUM_FALL_CLASSES = len(FALL_QUALITIES)


def display_name(value: str) -> str:
    """Human-facing form of a vocabulary id, e.g. "let_go" -> "Let Go"."""
    return " ".join(part.capitalize() for part in value.split("_"))


class UnknownLabel(ValueError):
    """A label outside its closed vocabulary."""

    def __init__(self, field_name: str, value, allowed=None):
        self.field_name = field_name
        self.value = value
        self.allowed = tuple(allowed) if allowed is not None else VOCABULARIES.get(field_name, ())
        super().__init__(f"{field_name}={value!r} is not one of {list(self.allowed)}")


@dataclass(frozen=True)
class AttributeConfig:
    """One label per conditioning slot; validated against the closed vocabularies."""

    impact_location: str
    impact_quality: str
    glitch_quality: str
    fall_quality: str

    def __post_init__(self):
        for field_name, vocab in VOCABULARIES.items():
            value = getattr(self, field_name)
            if value not in vocab:
                raise UnknownLabel(field_name, value, vocab)

    def impact_class(self) -> int:
        """Joint (location, quality) class id in 0..19."""
        loc = IMPACT_LOCATIONS.index(self.impact_location)
        qual = IMPACT_QUALITIES.index(self.impact_quality)
        return loc * len(IMPACT_QUALITIES) + qual

    def glitch_class(self) -> int:
        return GLITCH_QUALITIES.index(self.glitch_quality)

    def fall_class(self) -> int:
        return FALL_QUALITIES.index(self.fall_quality)

    def as_dict(self) -> dict:
        return {
            "impact_location": self.impact_location,
            "impact_quality": self.impact_quality,
            "glitch_quality": self.glitch_quality,
            "fall_quality": self.fall_quality,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttributeConfig":
        return cls(**{k: d[k] for k in VOCABULARIES})

    @classmethod
    def random(cls, rng: np.random.Generator) -> "AttributeConfig":
        """Uniform draw over the full attribute grid."""
        return cls(
            impact_location=IMPACT_LOCATIONS[rng.integers(len(IMPACT_LOCATIONS))],
            impact_quality=IMPACT_QUALITIES[rng.integers(len(IMPACT_QUALITIES))],
            glitch_quality=GLITCH_QUALITIES[rng.integers(len(GLITCH_QUALITIES))],
            fall_quality=FALL_QUALITIES[rng.integers(len(FALL_QUALITIES))],
        )
