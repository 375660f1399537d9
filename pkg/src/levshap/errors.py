"""Exception types shared across the package."""

from __future__ import annotations

__all__ = ["SolverError", "OracleProtocolError", "GammaUndefinedError"]


class SolverError(RuntimeError):
    """A regression solve failed; carries rank/conditioning diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class OracleProtocolError(RuntimeError):
    """An external value-function process violated the wire protocol.

    The offending batch (wire-encoded masks), if any, is attached.
    """

    def __init__(self, message: str, batch: list[str] | None = None):
        super().__init__(message)
        self.batch = list(batch) if batch is not None else None


class GammaUndefinedError(ValueError):
    """The residual-to-signal ratio is undefined (constant game)."""
