"""Exception hierarchy shared by every stage of the chain."""


class AudioLogError(Exception):
    """Base class for all errors raised by audiolog."""


class MalformedWav(AudioLogError):
    pass


class UnsupportedEncoding(AudioLogError):
    pass


class EmptyClip(AudioLogError):
    pass


class LengthMismatch(AudioLogError):
    pass


class SilentFrame(AudioLogError):
    pass


class KeepTooLarge(AudioLogError):
    pass


class EmptySequence(AudioLogError):
    pass


class NoSpeechDetected(AudioLogError):
    pass


class InsufficientVoicing(AudioLogError):
    pass


class ZeroAmplitudeFrame(AudioLogError):
    pass


class AllFramesSilent(AudioLogError):
    pass


class TooFewFrames(AudioLogError):
    pass


class TooLittleSpeech(AudioLogError):
    pass


class DegenerateClusters(AudioLogError):
    """Diarization collapsed to one cluster; the clip is single-speaker."""


class DegenerateMeans(AudioLogError):
    pass


class SingularScatter(AudioLogError):
    pass


class SingleClassInput(AudioLogError):
    pass


class DimensionMismatch(AudioLogError):
    pass


class NonfiniteLoss(AudioLogError):
    pass


class EmptyTestSet(AudioLogError):
    pass


class ConfigError(AudioLogError):
    pass


class ManifestMalformed(AudioLogError):
    pass


class ModelMissing(AudioLogError):
    pass


class ModelFormatError(AudioLogError):
    pass


class NoInputs(AudioLogError):
    pass
