"""Exception types shared across the package."""


class WallFormError(Exception):
    """Base class for all structured errors raised by this package."""


class BilinearityViolation(WallFormError):
    """A bilinear map is not well defined over the group relations."""


class SquareViolation(WallFormError):
    """A pair of homomorphisms fails to commute with the tau maps."""


class HMismatch(WallFormError):
    """Two pairs built over different coefficient groups were combined."""


class ParameterMismatch(WallFormError):
    """Two forms with different form parameters were combined."""


class AxiomViolation(WallFormError):
    """A form axiom fails.

    ``axiom`` is one of ``"i" .. "vi"``, ``"symmetry"``,
    ``"well-definedness"`` or ``"polarization"``; ``witness`` names the
    offending generators and values.
    """

    def __init__(self, axiom, witness):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"axiom {axiom} violated: {witness}")


class PreservationViolation(WallFormError):
    """A candidate morphism fails to preserve one of the structure maps."""

    def __init__(self, which, witness):
        self.which = which
        self.witness = witness
        super().__init__(f"{which} not preserved: {witness}")


class InvalidInput(WallFormError):
    """An operation received data outside its stated precondition."""


class RankTooSmall(WallFormError):
    """The source form has too little rank for the requested construction."""


class NotSupported(WallFormError):
    """The general case is deliberately not implemented."""


class SimplexNotFound(WallFormError):
    """A simplex was requested that is not present in the complex."""


class ParseError(WallFormError):
    """An input document does not match the expected schema."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{message}" + (f" (at {path})" if path else ""))


class UnsupportedCommand(WallFormError):
    """The CLI was asked to run an unknown command."""
