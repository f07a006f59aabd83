"""
tametilt errors

Domain exceptions. Each carries the id of the check that failed so the CLI
can report it in its error document.
"""

from typing import Any, Dict, Optional


class TametiltError(ValueError):
    """Base error for invalid tube data, filters and pairs"""

    def __init__(self, message: str, check: str = "tametilt", witness: Any = None):
        super().__init__(message)
        self.check = check
        self.witness = witness

    def to_json(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"check": self.check, "message": str(self)}
        if self.witness is not None:
            doc["witness"] = self.witness
        return doc


class RegistryError(TametiltError):
    """Malformed registry document or unknown tube"""


class PointError(TametiltError):
    """Malformed point, quasi-simple key or set text"""


class FilterError(TametiltError):
    """Resolving filter that is not submodule- or extension-closed"""


def witness_text(*items: Optional[object]) -> list:
    """Render witness points as their text form"""
    return [str(item) for item in items if item is not None]
