"""HTTP facade over campaigns: create, ask, tell, inspect.

State lives on disk under one data directory, one subdirectory per
campaign (config plus journal), so a service restart rebuilds every
campaign by replaying its journal.  Mutations are serialized per
campaign by the campaign's own lock.
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .campaign import (
    AlreadyObservedError,
    BudgetExhaustedError,
    Campaign,
    CampaignConfig,
    CampaignError,
    EmptyCampaignError,
    InvalidObservationError,
    InvalidRequestError,
    PendingSuggestionError,
    UnknownSuggestionError,
    CONFIG_NAME,
)
from .config import ConfigError

__all__ = ["ApiError", "CampaignStore", "create_app", "new_ulid", "DEFAULT_PORT"]

DEFAULT_PORT = 8765
META_NAME = "meta.json"

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


def new_ulid(now: float | None = None) -> str:
    """Sortable 26 character id: 48 bit millisecond time plus 80 random bits."""
    ts = int((time.time() if now is None else now) * 1000) & ((1 << 48) - 1)
    value = (ts << 80) | int.from_bytes(os.urandom(10), "big")
    return "".join(_CROCKFORD[(value >> (125 - 5 * i)) & 31] for i in range(26))


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}

    def payload(self) -> dict:
        return {"error": {"code": self.code, "message": self.message, "details": self.details}}


def _campaign_api_error(exc: CampaignError) -> ApiError:
    if isinstance(exc, PendingSuggestionError):
        return ApiError(
            409, "pending_suggestion_exists", str(exc), {"pending_id": exc.pending_id}
        )
    if isinstance(exc, UnknownSuggestionError):
        return ApiError(409, "pending_suggestion_exists", str(exc), {"pending_id": None})
    if isinstance(exc, BudgetExhaustedError):
        return ApiError(409, "budget_exhausted", str(exc))
    if isinstance(exc, InvalidObservationError):
        return ApiError(422, "invalid_observation", str(exc))
    if isinstance(exc, InvalidRequestError):
        return ApiError(422, "invalid_operating_point", str(exc))
    if isinstance(exc, EmptyCampaignError):
        return ApiError(409, "empty_campaign", str(exc))
    return ApiError(500, "campaign_error", str(exc))


class CampaignStore:
    """Disk backed campaign registry with lazy journal replay."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._campaigns: dict[str, Campaign] = {}
        self._keys: dict[str, str] = {}
        self._lock = threading.Lock()
        for meta_path in self.data_dir.glob(f"*/{META_NAME}"):
            try:
                meta = json.loads(meta_path.read_text())
            except (OSError, json.JSONDecodeError):
                continue
            key = meta.get("idempotency_key")
            if key:
                self._keys[key] = meta["id"]

    def ids(self) -> list[str]:
        on_disk = {
            p.parent.name for p in self.data_dir.glob(f"*/{CONFIG_NAME}")
        }
        return sorted(on_disk | set(self._campaigns))

    def create(self, config: CampaignConfig, idempotency_key: str | None):
        with self._lock:
            if idempotency_key and idempotency_key in self._keys:
                existing = self._keys[idempotency_key]
                return existing, self.get(existing), False
            campaign_id = new_ulid()
            directory = self.data_dir / campaign_id
            campaign = Campaign.create(config, directory=directory)
            meta = {
                "id": campaign_id,
                "idempotency_key": idempotency_key,
                "created_at": time.time(),
            }
            (directory / META_NAME).write_text(json.dumps(meta, indent=2) + "\n")
            self._campaigns[campaign_id] = campaign
            if idempotency_key:
                self._keys[idempotency_key] = campaign_id
            return campaign_id, campaign, True

    def get(self, campaign_id: str) -> Campaign:
        campaign = self._campaigns.get(campaign_id)
        if campaign is not None:
            return campaign
        directory = self.data_dir / campaign_id
        if not (directory / CONFIG_NAME).exists():
            raise ApiError(404, "campaign_not_found", f"no campaign {campaign_id}")
        campaign = Campaign.load(directory)
        self._campaigns[campaign_id] = campaign
        return campaign


class CreateCampaignBody(BaseModel):
    config: dict
    idempotency_key: str | None = None


class ObservationBody(BaseModel):
    suggestion_id: int
    value: float
    cost: float | None = None


def _parse_grid(grid: str, domain) -> tuple[list[int], int]:
    """Grid spec "axes:n" where axes is one or two comma separated axis
    indices or names, e.g. "0:41" or "y_co,p:21"."""
    names = getattr(domain, "axis_names", None) or [f"x{i}" for i in range(domain.dim)]
    try:
        axes_part, _, n_part = grid.partition(":")
        n = int(n_part) if n_part else 33
        axes = []
        for token in axes_part.split(","):
            token = token.strip()
            if token in names:
                axes.append(names.index(token))
            else:
                axes.append(int(token))
        return axes, n
    except (ValueError, AttributeError) as exc:
        raise ApiError(422, "invalid_operating_point", f"bad grid spec {grid!r}") from exc


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get("MFBO_DATA_DIR", "./mfbo-data")
    store = CampaignStore(Path(data_dir))
    app = FastAPI(title="syngas-mfbo", version="0.1.0")
    app.state.store = store

    @app.exception_handler(ApiError)
    async def handle_api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.payload())

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "error": {
                    "code": "invalid_request",
                    "message": "request body failed validation",
                    "details": {"errors": exc.errors()},
                }
            },
        )

    @app.post("/campaigns", status_code=201)
    def create_campaign(body: CreateCampaignBody):
        try:
            config = CampaignConfig.from_dict(body.config)
        except ConfigError as exc:
            raise ApiError(422, "invalid_config", str(exc))
        campaign_id, campaign, created = store.create(config, body.idempotency_key)
        content = {"id": campaign_id, "summary": campaign.summary(), "created": created}
        return JSONResponse(status_code=201 if created else 200, content=content)

    @app.get("/campaigns")
    def list_campaigns():
        out = []
        for campaign_id in store.ids():
            campaign = store.get(campaign_id)
            out.append({"id": campaign_id, "summary": campaign.summary()})
        return {"campaigns": out}

    @app.get("/campaigns/{campaign_id}")
    def get_campaign(campaign_id: str):
        campaign = store.get(campaign_id)
        return {"id": campaign_id, "summary": campaign.summary()}

    @app.post("/campaigns/{campaign_id}/suggestions")
    def post_suggestion(campaign_id: str):
        campaign = store.get(campaign_id)
        repeat = campaign.pending_id is not None
        try:
            suggestion = campaign.suggest()
        except CampaignError as exc:
            raise _campaign_api_error(exc)
        return {"suggestion": suggestion.to_dict(), "repeat": repeat}

    @app.post("/campaigns/{campaign_id}/observations")
    def post_observation(campaign_id: str, body: ObservationBody):
        campaign = store.get(campaign_id)
        try:
            result = campaign.record(body.suggestion_id, body.value, body.cost)
        except AlreadyObservedError as exc:
            return {"observation": exc.result, "summary": campaign.summary(), "repeat": True}
        except CampaignError as exc:
            raise _campaign_api_error(exc)
        return {"observation": result, "summary": campaign.summary(), "repeat": False}

    @app.get("/campaigns/{campaign_id}/history")
    def get_history(campaign_id: str):
        campaign = store.get(campaign_id)
        return {"observations": campaign.history(), "budget_spent": campaign.budget_spent}

    @app.get("/campaigns/{campaign_id}/posterior")
    def get_posterior(campaign_id: str, grid: str = "0:33"):
        campaign = store.get(campaign_id)
        axes, n = _parse_grid(grid, campaign.domain)
        try:
            return campaign.posterior_slice(axes, n)
        except CampaignError as exc:
            raise _campaign_api_error(exc)

    return app


def serve(port: int | None = None, data_dir: str | None = None) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("MFBO_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(data_dir), host="127.0.0.1", port=port, log_level="info")
