"""Exception types shared across the package."""


class ToleranceError(Exception):
    """A numerical residue exceeded its configured tolerance."""


class HermiticityError(ToleranceError):
    """Matrix is not hermitian within tolerance."""


class SymmetryError(ToleranceError):
    """Matrix is not symmetric within tolerance."""


class StateValidationError(ToleranceError):
    """Density operator violates trace normalization or positivity."""


class CutoffError(Exception):
    """A Fock-space truncation would discard non-negligible amplitude."""


class CutoffTooSmallError(CutoffError):
    """Requested cutoff leaves more tail mass than the truncation tolerance."""


class OrderError(ValueError):
    """Moment vector too short or of the wrong parity for the requested test."""


class DomainError(ValueError):
    """Parameter outside the domain on which a formula is defined."""
