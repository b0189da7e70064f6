"""Shared exception types."""


class CotlabError(Exception):
    """Base class for all library-specific errors."""


class NotCoprimeError(CotlabError, ValueError):
    """An operand was required to be coprime to the modulus and is not."""


class EmptyWindowError(CotlabError, ValueError):
    """The window [a0*q, a1*q] contains no admissible integer."""


class CapTooLargeError(CotlabError, ValueError):
    """Requested truncation cap exceeds the supported range."""


class ThresholdTooLargeError(CotlabError, ValueError):
    """Selection threshold 2**m1 must stay below the modulus."""


class EmptySampleError(CotlabError, ValueError):
    """An empirical distribution was built from an empty sample."""


class ConfigParseError(CotlabError, ValueError):
    """A batch config file is malformed; message names the section/field."""


class CostGuardError(CotlabError, ValueError):
    """A requested computation exceeds the library's cost guard."""
