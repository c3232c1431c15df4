"""Exception types shared across the package."""

from __future__ import annotations


class DivergenceError(RuntimeError):
    """Integration produced a non-finite state.

    Carries the time of the failed step and, when available, the trajectory
    recorded up to that point so callers can persist partial output.
    """

    def __init__(self, t: float, partial=None):
        super().__init__(f"non-finite state encountered at t = {t:.9g}")
        self.t = t
        self.partial = partial


class ResolutionError(RuntimeError):
    """Trajectory is sampled too coarsely for the requested analysis."""

    def __init__(self, message: str, hint: str | None = None):
        super().__init__(message)
        self.hint = hint


class InfeasibleError(ValueError):
    """No admissible parameter choice exists; the message names the violated inequality."""
