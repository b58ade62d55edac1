"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the command-line
front end maps to an exit status.
"""


class SocError(ValueError):
    code = "soc_error"


class DimensionMismatch(SocError):
    code = "dimension_mismatch"


class NotInOmega(SocError):
    """The pair is not complementary: x or y is outside K, or <x, y> != 0."""

    code = "not_in_omega"


class AmbiguousCase(SocError):
    """Case classification flips within the tolerance band."""

    code = "ambiguous_case"


class NotDifferentiable(SocError):
    code = "not_differentiable"


class InvalidGrid(SocError):
    code = "invalid_grid"


class UnsupportedRegion(SocError):
    code = "unsupported_region"


class WrongCase(SocError):
    code = "wrong_case"
