"""
----------------------------------------------------------------------------
 Outcome records of the oracle self-check suites
----------------------------------------------------------------------------
"""

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from .base import BaseModel


class CheckStatus(Enum):
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


@dataclass
class CheckResult(BaseModel):
    """Result of one check on one instance"""
    check: str
    instance_id: int
    status: CheckStatus
    tolerance: float
    error: float = 0.0
    execution_time: float = 0.0
    message: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.execution_time < 0:
            raise ValueError("Execution time cannot be negative")
        if self.tolerance < 0:
            raise ValueError("Tolerance cannot be negative")


@dataclass
class CheckReport(BaseModel):
    """All check results of one oracle-check run"""
    results: List[CheckResult] = field(default_factory=list)
    started_at: datetime = field(default_factory=datetime.now)
    completed_at: Optional[datetime] = None

    def passed(self) -> bool:
        return bool(self.results) and all(r.status is CheckStatus.PASSED for r in self.results)

    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if r.status is not CheckStatus.PASSED]

    def counts(self) -> Dict[str, Dict[str, int]]:
        """Per-check tally of statuses"""
        table: Dict[str, Dict[str, int]] = {}
        for result in self.results:
            row = table.setdefault(result.check, {s.value: 0 for s in CheckStatus})
            row[result.status.value] += 1
        return table

    def mark_completed(self):
        self.completed_at = datetime.now()
