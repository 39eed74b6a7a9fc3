"""Exception hierarchy shared by every stage of the pipeline."""


class SongprintError(Exception):
    """Base class for all errors raised by songprint."""


class MalformedContainer(SongprintError):
    """The byte stream is not a well-formed RIFF/WAVE container."""

    def __init__(self, field, detail):
        self.field = field
        super().__init__(f"malformed WAV container ({field}): {detail}")


class UnsupportedFormat(SongprintError):
    """The WAV header is valid but describes an encoding we do not decode."""

    def __init__(self, field, value, expected):
        self.field = field
        self.value = value
        super().__init__(f"unsupported WAV {field}={value!r} (expected {expected})")


class SignalTooShort(SongprintError):
    pass


class InvalidBand(SongprintError):
    pass


class EmptyInput(SongprintError):
    pass


class SingleClassDataset(SongprintError):
    def __init__(self, missing):
        self.missing = missing
        super().__init__(f"dataset has no examples of class {missing!r}")


class TooFewMinority(SongprintError):
    pass


class BadK(SongprintError):
    pass


class EmptyDataset(SongprintError):
    pass


class NonFiniteLoss(SongprintError):
    pass


class DatasetTooSmall(SongprintError):
    pass


class ZeroClass(SongprintError):
    pass


class ConfigError(SongprintError):
    pass
