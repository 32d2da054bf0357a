"""Health check endpoint."""

from fastapi import APIRouter

from config import get_scenarios

router = APIRouter()


@router.get("/health")
def health():
    return {"status": "ok", "scenarios": len(get_scenarios())}
