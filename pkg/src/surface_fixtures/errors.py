"""Exception types raised across the package."""


class SurfaceFixtureError(Exception):
    """Base class for all package errors."""


class EmptyCloud(SurfaceFixtureError):
    pass


class NonFiniteCoordinate(SurfaceFixtureError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"non-finite coordinate at point {index}")


class InsufficientPoints(SurfaceFixtureError):
    def __init__(self, k, n):
        self.k = k
        self.n = n
        super().__init__(f"need at least k+1={k + 1} points, got {n}")


class DegenerateNeighborhood(SurfaceFixtureError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"collinear/degenerate neighborhood at point {index}")


class LengthMismatch(SurfaceFixtureError):
    pass


class NonContiguousIds(SurfaceFixtureError):
    def __init__(self, found):
        self.found = sorted(found)
        super().__init__(f"region ids must be 0..N without gaps, found {self.found}")


class FramesMissing(SurfaceFixtureError):
    pass


class IsolatedBoundaryPoint(SurfaceFixtureError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"boundary point {index} has no exterior neighbor")


class RankDeficientStencil(SurfaceFixtureError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"gradient stencil at point {index} is rank deficient")


class NoDirichletOnComponent(SurfaceFixtureError):
    def __init__(self, component_id):
        self.component_id = component_id
        super().__init__(f"connected component {component_id} has no Dirichlet data")


class SolverDivergence(SurfaceFixtureError):
    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"iterative solve did not converge: residual={residual:g} "
            f"after {iterations} iterations"
        )


class NoTargetRegion(SurfaceFixtureError):
    pass


class SpecValidationError(SurfaceFixtureError):
    """Fixture spec file failed schema validation; message carries location."""


class ParseError(SurfaceFixtureError):
    def __init__(self, message, line=None, offset=None):
        self.line = line
        self.offset = offset
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif offset is not None:
            where = f" (byte offset {offset})"
        super().__init__(message + where)


class MissingProperty(SurfaceFixtureError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"PLY file is missing required property '{name}'")


class BadLabelRange(SurfaceFixtureError):
    pass
