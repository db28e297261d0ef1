"""Software twin of a tap-to-tactile music streaming system.

Capture rhythmic taps as force frames, stream them over a small UDP
protocol with jitter buffering, render them on a simulated three-unit
five-bar-linkage haptic display, and run/analyze the blind
melody-recognition experiment end to end.
"""

__version__ = "0.1.0"

from .model import (Condition, ForceFrame, ModelError, Onset, PatternError,
                    RhythmPattern, FORCE_MAX_N, NUM_CHANNELS)
from .melodies import MelodyId

__all__ = [
    "Condition", "ForceFrame", "MelodyId", "ModelError", "Onset",
    "PatternError", "RhythmPattern", "FORCE_MAX_N", "NUM_CHANNELS",
    "__version__",
]
