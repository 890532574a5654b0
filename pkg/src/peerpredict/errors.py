"""Exception hierarchy. Every domain error raised by this package derives
from PeerPredictError so callers (and the CLI) can map them to exit codes."""


class PeerPredictError(Exception):
    pass


class OutOfRange(PeerPredictError):
    """A numeric argument lies outside its admissible interval."""


class NotPositivelyCorrelated(PeerPredictError):
    """Prior violates q(1|1) > q(1|0)."""


class DegenerateModel(PeerPredictError):
    """Generative model has zero variance, so signals carry no information."""


class NotStrict(PeerPredictError):
    """Scoring rule (or payoff matrix) is not strictly proper."""


class DegenerateMatrix(PeerPredictError):
    """All payoff matrix entries are equal; normalization is undefined."""


class InfeasibleTangents(PeerPredictError):
    """Line-set tangents do not intersect strictly between the two conditionals."""


class OutsideHull(PeerPredictError):
    """Response point lies outside the reachable parallelogram."""


class TruthNotEquilibrium(PeerPredictError):
    """Truth-telling is not a strict equilibrium of the given payoff matrix."""


class Boundary(PeerPredictError):
    """Break-even point sits exactly on the branch boundary q(0|0)."""


class MirrorRequired(PeerPredictError):
    """Formula assumes q(1|1) > q(0|0); relabel the signals first."""


class SymmetricPrior(PeerPredictError):
    """Prior is signal symmetric (q(0|0) = q(1|1)); no payoff gap is attainable."""


class EpsilonMissing(PeerPredictError):
    """An explicit epsilon is required for unattainable priors."""


class NeverFocal(PeerPredictError):
    """No feasible number of agents satisfies the focality condition."""


class IndexOutOfRange(PeerPredictError):
    """Agent or dimension index outside the mechanism's range."""
