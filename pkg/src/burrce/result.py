from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass
class FitResult:
    """Outcome of one estimator run on one dataset."""

    c: float
    k: float
    loglik: float
    iterations: int
    converged: bool
    seconds: float
    method: str
    extra: dict = field(default_factory=dict, repr=False)

    def params(self):
        from .dist import BurrParams

        return BurrParams(self.c, self.k)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d
