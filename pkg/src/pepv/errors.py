"""Exception types shared across the solver.

Error names follow the solver's public contract: messages are formatted as
``Name(args)`` so they can be matched verbatim in CLI output and logs.
"""


class PEPvError(Exception):
    """Base class for all solver errors."""


class ValidationError(PEPvError):
    """Bad input: malformed problem files, inconsistent degrees, bad flags."""


class NumericalError(PEPvError):
    """A numerical routine failed: divergence, singularity, no convergence."""


class InhomogeneousRow(ValidationError):
    def __init__(self, row, detail=""):
        self.row = row
        msg = f"InhomogeneousRow({row})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class DegreeMismatch(ValidationError):
    def __init__(self, row, expected, got):
        self.row = row
        super().__init__(
            f"DegreeMismatch({row}): shift has degree {got}, row needs {expected}"
        )


class TooFewNodes(ValidationError):
    def __init__(self, n):
        super().__init__(f"TooFewNodes({n}): at least 4 quadrature nodes required")


class MixedDegrees(ValidationError):
    def __init__(self, degrees):
        super().__init__(
            f"MixedDegrees({list(degrees)}): monomial shifts need equal row degrees"
        )


class ZeroDenominator(ValidationError):
    def __init__(self, index):
        super().__init__(f"ZeroDenominator({index}): denominator form s_{index} is zero")


class ZeroVector(ValidationError):
    def __init__(self):
        super().__init__("ZeroVector: expected a nonzero vector")


class ZeroLeadingCoefficient(ValidationError):
    def __init__(self):
        super().__init__("ZeroLeadingCoefficient: leading polynomial coefficient is zero")


class Singular(NumericalError):
    def __init__(self, pivot_index):
        self.pivot_index = pivot_index
        super().__init__(f"Singular({pivot_index}): pivot below tolerance")


class SingularNode(NumericalError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"SingularNode({node}): matrix is singular at a quadrature node")


class NoConvergence(NumericalError):
    def __init__(self, what, iterations, residual=None):
        self.iterations = iterations
        self.residual = residual
        msg = f"NoConvergence({what}): iteration cap {iterations} reached"
        if residual is not None:
            msg += f", last residual {residual:.3e}"
        super().__init__(msg)


class SingularJacobian(NumericalError):
    def __init__(self):
        super().__init__("SingularJacobian: Newton Jacobian is singular")


class StartSystemDegenerate(NumericalError):
    def __init__(self, failed, total):
        super().__init__(
            f"StartSystemDegenerate: {failed}/{total} start-system roots failed to refine"
        )


class PathDiverged(NumericalError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"PathDiverged({path}): solution norm exceeded divergence bound")


class StepUnderflow(NumericalError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"StepUnderflow({path}): step size fell below the minimum")


class PathsCollided(NumericalError):
    def __init__(self, path_a, path_b):
        self.paths = (path_a, path_b)
        super().__init__(f"PathsCollided({path_a}, {path_b}): endpoints within jump tolerance")


class TrackingFailed(NumericalError):
    """A path could not be continued; carries column/node/path context."""

    def __init__(self, cause, column=None, node=None, path=None):
        self.cause = cause
        self.column = column
        self.node = node
        self.path = path
        where = ", ".join(
            f"{k}={v}" for k, v in (("column", column), ("node", node), ("path", path))
            if v is not None
        )
        super().__init__(f"TrackingFailed[{where}]: {cause}")


class RankZero(NumericalError):
    def __init__(self):
        super().__init__("RankZero: no eigenvalues detected inside the contour")


class CountMismatchWarning(UserWarning):
    """Retained path count differs from the declared or predicted count."""


class RankSaturatedWarning(UserWarning):
    """Numerical rank hit the Hankel size; more moment matrices are needed."""


class PathJumpWarning(UserWarning):
    """Two paths collided and re-tracking did not separate them."""
