"""Pydantic request/response models for the HTTP surface."""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, Field


class RunRequest(BaseModel):
    config: dict = Field(description="experiment config object (same schema as the file format)")
    seed: Optional[int] = Field(default=None, description="overrides noise.seed when set")
    threads: Optional[int] = Field(default=None, ge=1)


class FilePayload(BaseModel):
    name: str
    content: str


class RunResponse(BaseModel):
    manifest: dict
    files: List[FilePayload]


class MitigateRequest(BaseModel):
    zz_csv: str
    iz_csv: str
    floor: float = 0.05


class MitigateResponse(BaseModel):
    csv: str


class HealthResponse(BaseModel):
    status: str
    version: str
