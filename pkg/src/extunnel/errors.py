"""Exception types raised by the simulation layers.

Plain ``ValueError`` is used for malformed arguments (mismatched grids,
out-of-range parameters).  The classes below mark *numerical precondition*
failures: the inputs were well-formed but the requested computation is not
trustworthy (or not defined) in this regime.  The CLI maps them to exit
code 3, config/argument errors to exit code 2.
"""


class SimulationError(Exception):
    """Base class for numerical-precondition failures."""


class DomainTooSmallError(SimulationError):
    """Probability reached the guard bands at the grid edges (periodic
    wrap-around would contaminate the result), or an initial packet does
    not fit inside the domain."""


class ResolutionError(SimulationError):
    """A potential feature is too narrow for the grid spacing."""


class InteractionNotFinishedError(SimulationError):
    """Barrier-region probability is still too large for a reflected /
    transmitted decomposition to be meaningful."""


class DegenerateStateError(SimulationError):
    """Pauli-forbidden construction: linearly dependent one-particle
    states in a fermionic (anti-symmetrized) state."""


class UnsupportedEnergyError(SimulationError):
    """Scattering amplitudes requested at an energy that is evanescent in
    one of the contact regions."""


class BracketError(SimulationError):
    """A bracketing search (resonance location) found no interior extremum."""
