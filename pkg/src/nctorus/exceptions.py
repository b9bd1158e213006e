"""Custom exceptions for the nctorus app."""


class NCTException(Exception):
    """Root of every error raised by nctorus.

    Subclasses carry an ``exit_code`` used by the command line front end and
    may attach a ``diagnostics`` dictionary that ends up in the report.
    """

    exit_code = 1

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ProblemFileException(NCTException):
    """Custom exception related to problem file processing."""

    exit_code = 2


class InvalidParamException(ProblemFileException):
    """Custom exception thrown when an invalid key is found in a problem file."""

    def __init__(self, param):
        message = f"{param:s} is not a valid param"
        super().__init__(message)


class MissingParamException(ProblemFileException):
    """
    Custom exception thrown when a parameter required by the command is
    missing from the problem file.
    """

    def __init__(self, param):
        message = f"missing param : {param:s}"
        super().__init__(message)


class MalformedParamException(ProblemFileException):
    """Custom exception thrown when a parameter does not follow the schema."""

    def __init__(self, param, reason):
        message = f"{param:s} is malformed: {reason:s}"
        super().__init__(message)


class UnknownReferenceException(ProblemFileException):
    """Custom exception thrown when a named element cannot be resolved."""

    def __init__(self, name):
        message = f"unknown element reference : {name:s}"
        super().__init__(message)


class ProblemNotVerifiedException(ProblemFileException):
    """
    Custom exception thrown when someone tries to access problem values
    before verifying the problem file.
    """

    def __init__(self):
        message = "You must verify the problem with verify() before accessing its values"
        super().__init__(message)


class PreconditionException(NCTException):
    """A mathematical precondition of an operation does not hold."""

    exit_code = 3


class DimensionMismatchException(PreconditionException):
    """Operands do not live in the same dimension."""

    def __init__(self, expected, got, what="dimension"):
        message = f"{what} mismatch: expected {expected}, got {got}"
        super().__init__(message)


class ThetaMismatchException(PreconditionException):
    """Operands belong to different non-commutative tori."""

    def __init__(self):
        super().__init__("operands are defined over different theta matrices")


class AxisOutOfRangeException(PreconditionException):
    """A derivation axis is outside ``0 <= k < N``."""

    def __init__(self, axis, dimension):
        message = f"axis {axis} is out of range for a torus of dimension {dimension}"
        super().__init__(message)


class InvalidThetaException(PreconditionException):
    """The parameter matrix is not antisymmetric with entries in ]-1, 1[."""

    def __init__(self, reason):
        super().__init__(f"invalid theta matrix: {reason}")


class NotUnimodularException(PreconditionException):
    """A torus action parameter has a component off the unit circle."""

    def __init__(self, deviation):
        message = f"torus action parameter is not unimodular (max ||z_k| - 1| = {deviation:.3e})"
        super().__init__(message)


class NotSkewAdjointException(PreconditionException):
    """An element expected to be skew-adjoint is not."""

    def __init__(self, what, deviation, tolerance):
        message = (
            f"{what} is not skew-adjoint: ||a + a*|| = {deviation:.3e} "
            f"exceeds {tolerance:.1e}"
        )
        super().__init__(message, {"deviation": deviation})


class NotUnitaryException(PreconditionException):
    """A gauge element is not unitary."""

    def __init__(self, deviation, tolerance):
        message = (
            f"element is not unitary: ||uu* - 1|| = {deviation:.3e} "
            f"exceeds {tolerance:.1e}"
        )
        super().__init__(message, {"deviation": deviation})


class NonCommutingFamilyException(PreconditionException):
    """A family of scalar matrices expected to commute pairwise does not."""

    def __init__(self, first, second, deviation):
        message = (
            f"matrices {first} and {second} do not commute "
            f"(||[a, b]|| = {deviation:.3e})"
        )
        super().__init__(message, {"pair": [first, second], "deviation": deviation})


class NotFlatException(PreconditionException):
    """The connection does not have zero curvature."""

    def __init__(self, classification, residual):
        message = (
            f"connection is not flat (curvature is {classification}, residual {residual:.3e})"
        )
        super().__init__(message, {"classification": classification, "residual": residual})


class NotConstantException(PreconditionException):
    """An element expected to lie in M_n(C) carries non-constant Fourier modes."""

    def __init__(self, what, deviation):
        message = f"{what} is not a constant matrix (non-constant mass {deviation:.3e})"
        super().__init__(message, {"deviation": deviation})


class AmbiguousRankException(PreconditionException):
    """Eigenvalues of a positive matrix straddle the rank threshold."""

    def __init__(self, eigenvalues, threshold):
        message = (
            f"eigenvalues {list(eigenvalues)} straddle the rank threshold {threshold:.3e}"
        )
        super().__init__(message, {"threshold": threshold})


class NotAPermutationException(PreconditionException):
    """A sequence is not a bijection of ``range(n)``."""

    def __init__(self, sequence):
        super().__init__(f"{list(sequence)} is not a permutation")


class SingularLatticeException(PreconditionException):
    """A lattice generator matrix is singular or ill-conditioned."""

    def __init__(self, condition, limit):
        message = (
            f"lattice generator matrix is singular or ill-conditioned "
            f"(condition number {condition:.3e}, limit {limit:.1e})"
        )
        super().__init__(message, {"condition_number": condition})


class DualPairingException(PreconditionException):
    """A computed dual lattice fails the pairing integrality check."""

    def __init__(self, defect, tolerance):
        message = (
            f"dual lattice pairing is not integral (distance to 2πℤ {defect:.3e}, "
            f"tolerance {tolerance:.1e})"
        )
        super().__init__(message, {"pairing_defect": defect})


class NoPerfectMatchingException(PreconditionException):
    """No perfect matching exists on the thresholded bipartite graph."""

    def __init__(self, matched, size):
        message = f"no perfect matching: only {matched} of {size} rows could be matched"
        super().__init__(message, {"matched": matched, "size": size})


class ConvergenceException(NCTException):
    """An iterative or randomized algorithm did not reach its goal."""

    exit_code = 4


class JointEigenvectorNotFoundException(ConvergenceException):
    """No candidate vector is an eigenvector of every covariant derivative."""

    def __init__(self, residuals):
        message = (
            "no joint eigenvector found within tolerance "
            f"(best residual {min(residuals, default=float('inf')):.3e})"
        )
        super().__init__(message, {"residuals": list(residuals)})


class GaugeFixStalledException(ConvergenceException):
    """The gauge fixing induction could not enlarge its partial isometry."""

    def __init__(self, step, rank, diagnostics=None):
        message = f"gauge fixing stalled at step {step} with tr(v*v) = {rank:.6f}"
        super().__init__(message, diagnostics)


class SimultaneousDiagonalizationException(ConvergenceException):
    """The conjugated family keeps off-diagonal mass above tolerance."""

    def __init__(self, defect, tolerance):
        message = (
            f"simultaneous diagonalization left an off-diagonal defect of {defect:.3e} "
            f"(tolerance {tolerance:.1e})"
        )
        super().__init__(message, {"defect": defect})
