"""Exception hierarchy shared across the package.

Two base classes matter for the CLI exit-code mapping: ``InputError``
(bad user input, exit 2) and ``SolveError`` (solver non-convergence,
exit 3). Everything else is a plain failure of a named operation.
"""


class LabError(Exception):
    pass


class InputError(LabError):
    """Malformed or inconsistent user-supplied data."""


class SolveError(LabError):
    """A solver failed to reach its declared tolerance."""


# -- geometry ---------------------------------------------------------------

class MalformedSpec(InputError):
    pass


class OutOfBox(InputError):
    pass


class DegenerateSegment(InputError):
    pass


class EmptyScene(InputError):
    pass


# -- class predicates -------------------------------------------------------

class TooManyArcs(InputError):
    pass


class NotOnSet(InputError):
    pass


class SearchFailed(LabError):
    """A certified search exhausted its budget; flags a bad witness."""


class ConeConditionFails(LabError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionNotMet(InputError):
    pass


class NoExteriorBalls(InputError):
    pass


# -- meshing ----------------------------------------------------------------

class SceneTooFine(InputError):
    pass


class NotACrackEdge(InputError):
    pass


# -- solvers ----------------------------------------------------------------

class BadExponent(InputError):
    pass


class NoConvergence(SolveError):
    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class SingularSystem(SolveError):
    pass


class BadTruncation(InputError):
    pass


# -- experiments ------------------------------------------------------------

class ClassCheckFailed(InputError):
    pass


class MeshFailure(InputError):
    pass


class NonPositiveData(InputError):
    pass
