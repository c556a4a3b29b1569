from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .series import QSeries

PASS = "pass"
FAIL = "fail"
TRUNCATION_FAILURE = "truncation-failure"


class TruncationFailure(RuntimeError):
    """An infinite or bilateral sum did not drop below the working order in budget."""


@dataclass(frozen=True)
class Mismatch:
    exponent: int
    lhs: int
    rhs: int
    index: Any = None

    def to_dict(self) -> dict:
        out = {"exponent": self.exponent, "lhs": str(self.lhs), "rhs": str(self.rhs)}
        if self.index is not None:
            out["index"] = list(self.index) if isinstance(self.index, tuple) else self.index
        return out


@dataclass
class VerificationReport:
    id: str
    params: dict
    order: int
    status: str
    first_mismatch: Optional[Mismatch] = None
    elapsed: float = 0.0
    detail: dict = field(default_factory=dict)
    # the two series last compared; kept for coefficient export
    lhs: Optional[QSeries] = None
    rhs: Optional[QSeries] = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "id": self.id,
            "params": dict(sorted(self.params.items())),
            "order": self.order,
            "status": self.status,
            "first_mismatch": self.first_mismatch.to_dict() if self.first_mismatch else None,
        }
        if self.detail:
            out["detail"] = self.detail
        if timings:
            out["elapsed"] = round(self.elapsed, 6)
        return out

    def summary(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        line = f"{self.id}({params}) T={self.order}: {self.status}"
        if self.first_mismatch is not None:
            m = self.first_mismatch
            where = f" index {m.index}" if m.index is not None else ""
            line += f" at q^{m.exponent}{where}: lhs={m.lhs} rhs={m.rhs}"
        for key, value in sorted(self.detail.items()):
            line += f" {key}={value}"
        return line
