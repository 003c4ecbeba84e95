"""Exception types raised across the package."""


class IRSAError(ValueError):
    pass


class NegativeCoefficient(IRSAError):
    pass


class NotNormalized(IRSAError):
    pass


class EmptyDistribution(IRSAError):
    pass


class DistributionParseError(IRSAError):
    pass


class DegreeExceedsSlots(IRSAError):
    pass


class TooLargeToEnumerate(IRSAError):
    pass


class BracketFailure(IRSAError):
    pass


class InvalidPopulation(IRSAError):
    pass


class UnknownDistribution(IRSAError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""



class ConfigError(IRSAError):
    pass
