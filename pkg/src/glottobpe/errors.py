"""Exception types shared across the package."""

from __future__ import annotations


class MalformedInputError(ValueError):
    """An input file violates its declared format.

    Carries the offending path and 1-based line number so CLI error
    messages can point at the exact row.
    """

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no
