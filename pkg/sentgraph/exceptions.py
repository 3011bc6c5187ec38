class SentGraphException(Exception):
    """ Base class for all SentGraph exceptions. """
    pass


class Invalid(SentGraphException):
    """ Invalid Argument or Configuration Value. """
    pass


class EmptyDocument(Invalid):
    """ Document has no Sentences. """
    pass


class NotFound(SentGraphException):
    """ File or Record not found. """
    pass


class ParseError(SentGraphException):
    """ Malformed Input File.

        Attributes:
            path (str): File being parsed.
            line (int): 1-based line number of the failure.
    """

    def __init__(self, message, path=None, line=None):
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if self.path and line:
            location = f"{self.path}:{line}: "
        elif self.path:
            location = f"{self.path}: "
        super().__init__(f"{location}{message}")


class ValidationError(SentGraphException):
    """ Record violates its Contract. """
    pass


class InsufficientData(SentGraphException):
    """ Not enough Data for the Statistic. """
    pass


class Unauthorized(SentGraphException):
    """ Invalid NCBI API Key. """
    pass


class RateLimited(SentGraphException):
    """ NCBI Request Rate exceeded. """
    pass
