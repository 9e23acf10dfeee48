"""Exception hierarchy. Every class carries a distinct CLI exit code."""

from __future__ import annotations


class FormalRingError(Exception):
    exit_code = 1

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "witness": _plain(self.witness),
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_plain(v) for v in seq]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


class InternalCheckFailed(FormalRingError):
    exit_code = 1


class ParseError(FormalRingError):
    exit_code = 3

    def __init__(self, line: int | None, message: str):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message, witness={"line": line})
        self.line = line


class UnresolvedReference(FormalRingError):
    exit_code = 4

    def __init__(self, name: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}unresolved reference {name!r}", witness={"name": name, "line": line})
        self.name = name
        self.line = line


class AxiomViolation(FormalRingError):
    """A ring or module law fails; ``witness`` holds the offending elements."""

    exit_code = 5

    def __init__(self, axiom: str, witness=None):
        super().__init__(f"{axiom} fails at {witness}", witness=witness)
        self.axiom = axiom


class AlphaViolation(FormalRingError):
    exit_code = 6

    def __init__(self, indices, witness):
        i, j, k, l = (x + 1 for x in indices)
        super().__init__(
            f"associativity fails for slots ({i},{j},{k},{l}) at elements {witness}",
            witness={"indices": [i, j, k, l], "elements": list(witness)},
        )
        self.indices = tuple(indices)


class BalanceViolation(FormalRingError):
    exit_code = 7

    def __init__(self, indices, law: str, witness):
        i, j, k = (x + 1 for x in indices)
        super().__init__(
            f"product ({i},{j},{k}) violates {law} at {witness}",
            witness={"indices": [i, j, k], "law": law, "elements": list(witness)},
        )
        self.indices = tuple(indices)
        self.law = law


class NotLocal(FormalRingError):
    exit_code = 8

    def __init__(self, index: int, witness=None):
        super().__init__(f"diagonal ring {index + 1} is not local", witness=witness)
        self.index = index


class NotBasic(FormalRingError):
    exit_code = 9

    def __init__(self, i: int, j: int, witness):
        super().__init__(
            f"product ({i + 1},{j + 1},{i + 1}) reaches a unit of ring {i + 1}",
            witness={"indices": [i + 1, j + 1], "elements": list(witness)},
        )


class SizeLimitExceeded(FormalRingError):
    exit_code = 10

    def __init__(self, what: str, size: int, bound: int):
        super().__init__(f"{what} has size {size} > bound {bound}", witness={"size": size, "bound": bound})
        self.size = size
        self.bound = bound


class AssumptionFailed(FormalRingError):
    exit_code = 11

    def __init__(self, condition: str, message: str, witness=None):
        super().__init__(f"condition ({condition}) fails: {message}", witness=witness)
        self.condition = condition


class PrerequisiteFailed(FormalRingError):
    exit_code = 12


class SoclesDiffer(FormalRingError):
    exit_code = 13


class EmbeddingNotFound(InternalCheckFailed):
    exit_code = 15


class BadEnvelope(FormalRingError):
    exit_code = 14


# exit statuses that are not error classes
EXIT_USAGE = 2
EXIT_DISCREPANCY = 16


def exit_codes() -> dict[str, int]:
    """Error class name -> exit code, for documentation and tests."""
    out = {}
    stack = [FormalRingError]
    while stack:
        cls = stack.pop()
        out[cls.__name__] = cls.exit_code
        stack.extend(cls.__subclasses__())
    return dict(sorted(out.items(), key=lambda kv: kv[1]))
