"""Exception hierarchy for the hand-angle pipeline."""

from sklearn.exceptions import NotFittedError


class HandAnglesError(Exception):
    """Base class for all pipeline errors."""


class DecodeError(HandAnglesError):
    """An input file could not be decoded into an 8-bit RGB raster."""


class NoHandsFound(HandAnglesError):
    """No silhouette component large enough to be a hand."""


class DegenerateNeighborhood(HandAnglesError):
    """The orientation filter found no usable foreground around a candidate."""


class NoPalmFound(HandAnglesError):
    """No window position satisfied the palm fill condition."""


class HandTooSmall(NoPalmFound):
    """The hand bounding box is smaller than the palm search window."""


class EmptyObservation(HandAnglesError):
    """A reference capture was attempted on a hand with no fingertips."""


class InvalidReference(HandAnglesError):
    """A reference distance is not positive."""


class NoReference(NotFittedError, HandAnglesError):
    """Angles were requested before a reference frame was captured."""


class SpecOverflow(HandAnglesError):
    """A synthetic hand specification does not fit in the target image."""
