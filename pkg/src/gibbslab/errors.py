"""Exception types raised by the laboratory.

Everything derives from GibbslabError so callers can catch broadly; the
concrete classes mirror the failure modes of the individual operations.
"""


class GibbslabError(Exception):
    """Base class for all gibbslab errors."""


class ZeroDimension(GibbslabError):
    """A state vector was requested with dimension zero."""


class DimensionTooLarge(GibbslabError):
    """Requested dense dimension exceeds the 2**20 simulation cap."""


class DimensionMismatch(GibbslabError):
    """Two states (or a state and a predicate domain) disagree on dimension."""


class UnnormalizedAxis(GibbslabError):
    """A reflection axis deviates from unit norm by more than 1e-8."""


class NormalizationError(GibbslabError):
    """A state vector's norm drifted outside the 1e-10 invariant."""


class WeightOutOfRange(GibbslabError):
    """A bit-string weight specification is outside [0, N]."""


class IndexOutOfRange(GibbslabError):
    """A 1-based site index falls outside [1, N]."""


class EnergyOutOfRange(GibbslabError):
    """A Hamiltonian energy is not an integer in {0, ..., max_energy}."""


class EmptyGroundSpace(GibbslabError):
    """beta is infinite but no configuration has zero energy."""


class DeltaOutOfRange(GibbslabError):
    """A bias parameter delta is outside the open interval (0, 1/2)."""


class EvenL(GibbslabError):
    """A phase schedule was requested with an even (or nonpositive) length."""


class EmptyTarget(GibbslabError):
    """A search or preparation was requested with no marked configuration."""


class ZeroBudget(GibbslabError):
    """A distinguisher was invoked with a nonpositive sample/reflection budget."""


class BadRange(GibbslabError):
    """A bound expression received arguments outside its domain."""


class InfeasiblePair(GibbslabError):
    """(N, delta) do not yield integer weights N(1/2 +- delta) with 2*N*delta >= 1."""


class DegenerateInput(GibbslabError):
    """A fit was requested on fewer than three points or coincident abscissae."""


class ConfigError(GibbslabError):
    """An experiment configuration failed validation (CLI exit code 2)."""


class AssertionFailure(GibbslabError):
    """An experiment's embedded acceptance check failed (CLI exit code 1)."""
