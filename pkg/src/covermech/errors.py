"""Exception types shared across the package."""

from __future__ import annotations


class CovermechError(Exception):
    """Base class for all package-specific errors."""


class InvalidInstanceError(CovermechError, ValueError):
    """An instance file or in-memory instance violates its format contract."""


class SizeLimitError(CovermechError, ValueError):
    """An exact oracle was asked to solve an instance above its size cap."""


class ThresholdContractError(CovermechError):
    """A threshold function read a cost coordinate it must not depend on."""


class ScalingProbeError(CovermechError):
    """A neighbor threshold never crossed 1 below the probe limit, so no
    finite edge scaling exists for the conversion."""


class MonotonicityError(CovermechError):
    """A selection rule that must be monotone was caught violating it.

    Carries a replayable witness: (instance, node, low_cost, high_cost).
    """

    def __init__(self, message: str, witness: object = None):
        super().__init__(message)
        self.witness = witness


class LMPCertificateError(CovermechError):
    """A Lagrangian-multiplier-preserving cost certificate failed."""


class LoopGuardError(CovermechError):
    """A randomized loop exceeded its iteration guard."""


class LPError(CovermechError):
    """Base class for linear-programming failures."""


class InfeasibleLPError(LPError):
    """The linear program has no feasible point."""


class UnboundedLPError(LPError):
    """The linear program is unbounded in the optimization direction."""


class MechanismPreconditionError(CovermechError, ValueError):
    """A mechanism was invoked on an instance outside its stated domain."""
