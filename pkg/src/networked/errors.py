"""Exception hierarchy.

Every error carries a short ``category`` string; the CLI prints it so that
failures are machine-parsable.
"""


class NetworkedError(Exception):
    category = "Error"


class BadParams(NetworkedError, ValueError):
    category = "BadParams"


class OutOfRangeVertex(BadParams):
    category = "OutOfRangeVertex"


class DuplicateVertex(BadParams):
    category = "DuplicateVertex"


class EmptyEdge(BadParams):
    category = "EmptyEdge"


class NotKPartite(BadParams):
    category = "NotKPartite"


class LengthMismatch(BadParams):
    category = "LengthMismatch"


class ShapeMismatch(BadParams):
    category = "ShapeMismatch"


class SpecMismatch(BadParams):
    category = "SpecMismatch"


class MissingChiStar(BadParams):
    category = "MissingChiStar"


class ZeroWeight(BadParams):
    category = "ZeroWeight"


class ZeroNormalizer(ZeroWeight):
    category = "ZeroNormalizer"


class InfeasibleWeights(BadParams):
    category = "InfeasibleWeights"


class EmptyClass(BadParams):
    category = "EmptyClass"


class TooLarge(BadParams):
    category = "TooLarge"


class AlphabetTooLarge(TooLarge):
    category = "AlphabetTooLarge"


class ParseError(BadParams):
    category = "ParseError"


class SolverError(NetworkedError, ArithmeticError):
    category = "SolverError"


class Infeasible(SolverError):
    category = "Infeasible"


class Unbounded(SolverError):
    category = "Unbounded"


class IterationLimit(SolverError):
    category = "IterationLimit"
