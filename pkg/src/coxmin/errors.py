"""Exception types shared across the package."""


class CoxminError(Exception):
    """Base class for all package-specific errors."""


class NotFinite(CoxminError):
    """The Coxeter matrix does not define a finite group."""


class TooLarge(CoxminError):
    """Group order exceeds the configured enumeration bound."""


class SearchBound(CoxminError):
    """A witness search exceeded its configured bound."""


class FieldTooSmall(CoxminError):
    """The current field level cannot express a required cosine.

    Raised internally; callers that can raise the field level catch it
    and retry at lcm(L, d).
    """


class MultiplicityMismatch(CoxminError):
    """Trace-DFT multiplicities disagree with exact kernel ranks."""


class NoRegularPoint(CoxminError):
    """The requested constrained regular point does not exist."""


class NotAdmissible(CoxminError):
    """The angle sequence does not span a regular point of V."""


class NotGoodPosition(CoxminError):
    """The chamber is not in good position for the given filtration."""


class ConstructionFailed(CoxminError):
    """A construction with a guaranteed-existence proof failed; a bug."""


class HypothesisFailed(CoxminError):
    """Preconditions of a length-formula lemma could not be verified."""


class IdentityFailed(CoxminError):
    """A braid identity predicted by a theorem failed to hold."""


class TheoremViolation(CoxminError):
    """A computation contradicts a proved theorem; a test failure."""


class WalkStuck(CoxminError):
    """The descent walk found no certified step and no valid endpoint."""
