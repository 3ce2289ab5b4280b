"""Exception hierarchy shared by every layer of the package."""


class PostselectError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 1


class InvalidGeometry(PostselectError, ValueError):
    exit_code = 2


class InvalidParameter(PostselectError, ValueError):
    exit_code = 2


class InvalidConfig(PostselectError, ValueError):
    exit_code = 2


class UnsupportedOrder(PostselectError, ValueError):
    exit_code = 2


class CapacityExceeded(PostselectError):
    exit_code = 3


class ImpossibleDetection(PostselectError):
    """The requested detection record has (numerically) zero probability."""

    exit_code = 4
