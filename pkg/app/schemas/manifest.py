"""Pydantic schemas for run manifests."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel

from config import settings


class RunManifest(BaseModel):

    """How an artifact was produced."""

    subcommand: str
    argv: List[str]
    flags: Dict[str, Any] = {}
    inputs: Dict[str, str] = {}  # path -> sha256
    seed: Optional[int] = None
    version: str = settings.app_version
    outputs: List[str] = []
