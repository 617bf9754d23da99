"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (the class name) so the
CLI can print ``ERROR <code>: <detail>`` without a lookup table. Input and
validation problems derive from :class:`InputError` (exit status 1), bad
options from :class:`ConfigError` (exit status 2).
"""

from __future__ import annotations


class AccelFatigueError(ValueError):
    exit_code = 1

    @property
    def code(self) -> str:
        return type(self).__name__


class InputError(AccelFatigueError):
    exit_code = 1


class ConfigError(AccelFatigueError):
    exit_code = 2


class EmptyInput(InputError):
    pass


class MalformedRow(InputError):
    def __init__(self, index: int | None, detail: str):
        where = "header" if index is None else f"row {index}"
        super().__init__(f"{where}: {detail}")
        self.index = index


class NonMonotonicTimestamp(InputError):
    def __init__(self, index: int, detail: str = "timestamp not strictly increasing"):
        super().__init__(f"row {index}: {detail}")
        self.index = index


class NonFiniteValue(InputError):
    def __init__(self, index: int, detail: str = "non-finite acceleration value"):
        super().__init__(f"row {index}: {detail}")
        self.index = index


class TooFewSamples(InputError):
    pass


class DegenerateDistribution(InputError):
    def __init__(self, detail: str = "zero variance", resample: int | None = None):
        if resample is not None:
            detail = f"resample {resample}: {detail}"
        super().__init__(detail)
        self.resample = resample


class TooFewDistinctPoints(InputError):
    pass


class TieOnStd(InputError):
    pass


class NonUniformSampling(InputError):
    pass


class SeriesTooShort(InputError):
    pass


class EmptyData(InputError):
    pass


class ConfigInvalid(ConfigError):
    pass


class BandOutOfRange(ConfigError):
    pass
