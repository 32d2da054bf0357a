"""Exception types shared by the parsers, the reasoner and the CLI."""


class IntentError(Exception):
    """Base class for every error raised by this package."""


class _LocatedError(IntentError, ValueError):
    """An error that can point at a line/column of a source file."""

    def __init__(self, message: str, source: str | None = None,
                 line: int | None = None, column: int | None = None):
        self.message = message
        self.source = source
        self.line = line
        self.column = column
        super().__init__(self._render())

    def _render(self) -> str:
        where = []
        if self.source:
            where.append(str(self.source))
        if self.line is not None:
            where.append(str(self.line))
            if self.column is not None:
                where.append(str(self.column))
        if where:
            return f"{':'.join(where)}: {self.message}"
        return self.message


class DomainError(_LocatedError):
    """Bad domain description: syntax, sorts, arities, stratification."""


class NarrativeError(_LocatedError):
    """Bad narrative file or a history that does not fit the domain."""


class QuestionError(IntentError, ValueError):
    """A question that cannot be asked against the domain."""


class InconsistentTransition(IntentError):
    """No consistent successor state exists for an occurrence set."""
