"""Exception types shared across the package."""


class ProxilabError(Exception):
    """Base class for all errors raised by proxilab."""


class InputError(ProxilabError, ValueError):
    """Invalid point encoding, region, parameter or scenario content."""


class UnsupportedError(ProxilabError):
    """Operation is not defined for the given space model."""


class MembershipError(ProxilabError):
    """A map sent a point outside its declared codomain."""

    def __init__(self, message, point=None, image=None):
        super().__init__(message)
        self.point = point
        self.image = image


class ConvergenceError(ProxilabError):
    """An iterative routine hit its iteration cap."""

    def __init__(self, message, best=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.iterations = iterations
