"""Exception hierarchy shared by every layer of the engine."""
from __future__ import annotations

from typing import Optional


class SfcError(Exception):
    """Base class for all engine errors."""


class UnknownFieldError(SfcError):
    """A field name is not registered in the active catalog."""

    def __init__(self, name: str, scope: str = "field"):
        super().__init__(f"unknown {scope} {name!r}")
        self.name = name


class KindError(SfcError):
    """Two values (or a value and a field) have incompatible kinds."""


class ActionError(SfcError):
    """An action could not be applied to a packet/state pair."""


class ScenarioError(SfcError):
    """A scenario document is malformed or fails validation.

    ``path`` is a dotted location inside the document
    (``service_functions.TM.rules[0]``) and ``line`` is 1-based when known.
    """

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.path:
            where.append(self.path)
        prefix = f"{', '.join(where)}: " if where else ""
        return prefix + self.message
