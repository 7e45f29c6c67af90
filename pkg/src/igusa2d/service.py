"""HTTP front end: one POST endpoint per command, all sharing the runner."""

from __future__ import annotations

from typing import Any, Literal

from fastapi import FastAPI
from pydantic import BaseModel, Field

from . import __version__
from .runner import COMMANDS, RunConfig, run_document


class ProblemRequest(BaseModel):
    p: int | None = Field(default=None, description="prime carried by the problem document")
    polynomial: dict[str, Any]
    prime: int | None = None
    mode: Literal["minimal", "simple"] = "simple"
    max_level: int = 4

    def document(self) -> dict:
        doc: dict[str, Any] = {"polynomial": self.polynomial}
        if self.p is not None:
            doc["p"] = self.p
        return doc


class RunResponse(BaseModel):
    status: int
    reason: str | None = None
    document: dict[str, Any]
    csv: str | None = None


app = FastAPI(title="igusa2d", version=__version__)


@app.get("/health")
def health() -> dict:
    return {"ok": True, "version": __version__}


def _handler(command: str):
    def endpoint(req: ProblemRequest) -> RunResponse:
        cfg = RunConfig(command, prime=req.prime, mode=req.mode, max_level=req.max_level)
        out = run_document(command, req.document(), cfg)
        return RunResponse(status=out.status, reason=out.reason, document=out.document,
                           csv=out.extras.get("csv"))

    endpoint.__name__ = f"run_{command}"
    return endpoint


for _cmd in COMMANDS:
    app.post(f"/{_cmd}", response_model=RunResponse)(_handler(_cmd))
