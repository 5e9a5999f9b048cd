"""HTTP generation service.

Every error body is a flat JSON object with a machine-readable ``code`` and
a human ``message`` (plus field detail where it helps).  Vocabulary
violations come back as 400 naming the field and the allowed values, a
missing checkpoint as 409, and duration-bound violations as 422.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .. import __version__
from ..dataset.attributes import UnknownLabel, VOCABULARIES, display_name
from ..dataset.io import SCHEMA_VERSION, sequence_to_dict
from ..engine import DurationOutOfRange, GenerationEngine
from ..kinematics.fk import forward_kinematics
from ..kinematics.pose import POSE_DIM
from ..kinematics.skeleton import load_skeleton, presets_document
from .config import ServiceConfig


class ApiError(Exception):
    def __init__(self, status_code: int, code: str, message: str, **extra):
        self.status_code = status_code
        self.body = {"code": code, "message": message, **extra}
        super().__init__(message)


class GenerateRequest(BaseModel):
    attributes: dict
    body_model: str = "male"
    seed: int | None = None
    durations: list[int] | None = None
    checkpoint_id: str | None = None


class FkRequest(BaseModel):
    model: str = "male"
    frames: list


def _flatten_frames(frames: list) -> np.ndarray:
    """Accept flat 153-float rows or the structured frame objects the
    generate endpoint returns."""
    rows = []
    for i, frame in enumerate(frames):
        if isinstance(frame, dict):
            try:
                row = np.concatenate([
                    np.asarray(frame["root_pos"], dtype=np.float64).reshape(3),
                    np.asarray(frame["root_rot6d"], dtype=np.float64).reshape(6),
                    np.asarray(frame["joint_rot6d"], dtype=np.float64).reshape(-1),
                ])
            except (KeyError, TypeError, ValueError) as exc:
                raise ApiError(422, "bad_frame", f"frames[{i}] is malformed: {exc}")
        else:
            row = np.asarray(frame, dtype=np.float64).reshape(-1)
        if row.shape != (POSE_DIM,):
            raise ApiError(422, "bad_pose_dim",
                           f"frames[{i}] must have {POSE_DIM} scalars, got {row.size}")
        rows.append(row)
    if not rows:
        raise ApiError(422, "bad_frame", "frames must be non-empty")
    return np.stack(rows)


def _attributes_payload() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "fields": [
            {"name": name,
             "values": [{"name": v, "display_name": display_name(v)} for v in vocab]}
            for name, vocab in VOCABULARIES.items()
        ],
    }


def _load_engine(config: ServiceConfig) -> GenerationEngine | None:
    if not config.checkpoint_path:
        return None
    path = Path(config.checkpoint_path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    return GenerationEngine.from_checkpoint(path)


def create_app(config: ServiceConfig | None = None,
               engine: GenerationEngine | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="fallsynth", version=__version__)
    app.state.engine = engine if engine is not None else _load_engine(config)
    app.state.config = config
    attributes_payload = _attributes_payload()

    app.add_middleware(
        CORSMiddleware,
        allow_origins=[config.cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status_code, content=exc.body)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"code": "invalid_request", "message": str(exc.errors())})

    @app.get("/healthz")
    def healthz():
        engine = app.state.engine
        return {"status": "ok", "version": __version__,
                "checkpoint_id": engine.checkpoint_id if engine else None}

    @app.get("/api/v1/attributes")
    def attributes():
        return attributes_payload

    @app.get("/api/v1/skeleton")
    def skeleton(model: str = "male"):
        document = presets_document()
        if model not in document["presets"]:
            raise ApiError(400, "unknown_model",
                           f"unknown body model {model!r}", field="model",
                           allowed=sorted(document["presets"]))
        return {
            "schema_version": document["schema_version"],
            "model": model,
            "joint_names": document["joint_names"],
            "parent_index": document["parent_index"],
            "bone_offsets": document["presets"][model]["bone_offsets"],
        }

    @app.post("/api/v1/generate")
    def generate(request: GenerateRequest):
        engine = app.state.engine
        if engine is None:
            raise ApiError(409, "no_checkpoint", "no model checkpoint is loaded")
        if request.checkpoint_id is not None and request.checkpoint_id != engine.checkpoint_id:
            raise ApiError(409, "checkpoint_mismatch",
                           f"requested checkpoint {request.checkpoint_id} but "
                           f"{engine.checkpoint_id} is loaded")
        missing = [k for k in VOCABULARIES if k not in request.attributes]
        if missing:
            raise ApiError(400, "missing_field",
                           f"attributes missing {missing}", field=missing[0],
                           allowed=list(VOCABULARIES[missing[0]]))
        document = presets_document()
        if request.body_model not in document["presets"]:
            raise ApiError(400, "unknown_model",
                           f"unknown body model {request.body_model!r}",
                           field="body_model", allowed=sorted(document["presets"]))
        try:
            sequence, metadata = engine.generate(
                request.attributes, durations=request.durations,
                seed=request.seed, body_model=request.body_model)
        except UnknownLabel as exc:
            raise ApiError(400, "unknown_label", str(exc),
                           field=exc.field_name, allowed=list(exc.allowed))
        except DurationOutOfRange as exc:
            raise ApiError(422, "duration_out_of_range", str(exc))
        return {"sequence": sequence_to_dict(sequence), "metadata": metadata}

    @app.post("/api/v1/fk")
    def fk(request: FkRequest):
        document = presets_document()
        if request.model not in document["presets"]:
            raise ApiError(400, "unknown_model",
                           f"unknown body model {request.model!r}", field="model",
                           allowed=sorted(document["presets"]))
        frames = _flatten_frames(request.frames)
        positions = forward_kinematics(load_skeleton(request.model), frames)
        return {"model": request.model, "positions": positions.tolist()}

    return app
