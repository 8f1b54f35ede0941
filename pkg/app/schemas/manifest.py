from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """Sidecar JSON que acompaña a cada corrida de la CLI"""

    command: str
    parameters: Dict[str, Any]
    settings: Dict[str, Any] = {}
    version: str
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    outputs: List[str] = []


class CheckResult(BaseModel):
    """Resultado de un chequeo de aceptación"""

    suite: str
    name: str
    passed: bool
    value: Optional[float] = None
    limit: Optional[float] = None
    detail: str = ""


class VerificationReport(BaseModel):
    suite: str
    version: str
    passed: bool
    elapsed_seconds: float
    checks: List[CheckResult]
