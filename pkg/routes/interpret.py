"""Interpret a narrative posted as text."""

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from config import EXIT_PARSE
from narrative.report import to_dict
from narrative.runner import RunOptions, run_text

router = APIRouter(prefix="/api")


class InterpretRequest(BaseModel):
    narrative: str = Field(..., description="Narrative file text")
    questions: list[str] = Field(default_factory=list, description="Extra questions, e.g. 'occur pay(nicole,b)'")
    horizon: int | None = Field(default=None, ge=1)
    max_models: int | None = Field(default=None, ge=0)


@router.post("/interpret")
def interpret_narrative(request: InterpretRequest):
    options = RunOptions(horizon=request.horizon, max_models=request.max_models, ask=list(request.questions))
    result = run_text(request.narrative, options, name="<request>")
    if result.exit_code == EXIT_PARSE or result.report is None:
        raise HTTPException(status_code=400, detail=result.error or "invalid narrative")
    return to_dict(result.report)
