from __future__ import annotations

from enum import Enum


class EnvironmentLabel(str, Enum):
    INDOOR = "indoor"
    OUTDOOR = "outdoor"
    TV_MUSIC = "tv_music"


class MoodLabel(str, Enum):
    LAUGH = "laugh"
    SING = "sing"
    CRY = "cry"
    ARGUING = "arguing"
    SIGH = "sigh"


ENVIRONMENT_CLASSES = tuple(e.value for e in EnvironmentLabel)
MOOD_CLASSES = tuple(m.value for m in MoodLabel)


def label_value(label) -> str:
    return label.value if isinstance(label, Enum) else str(label)
