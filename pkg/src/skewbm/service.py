"""FastAPI service exposing density evaluation, sampling, simulation and
verification.  Run with ``uvicorn skewbm.service:app``.

CSV responses carry full round-trip float precision (``repr``), so equal
requests produce byte-identical bodies.
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field, model_validator

from . import __version__, density, sampling, verify, walk
from .errors import ConfigError, DomainError, QuadratureError, SamplerError
from .rng import RngStream


def _fmt(v) -> str:
    return repr(float(v))


def _csv(header, columns) -> str:
    lines = [",".join(header)]
    rows = zip(*columns)
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


class DensityRequest(BaseModel):
    alpha: float = Field(gt=0, lt=1)
    x: float = 0.0
    t: float = Field(default=1.0, gt=0)
    y_min: float = -3.0
    y_max: float = 3.0
    y_steps: int = Field(default=61, ge=1)
    ell_min: float = Field(default=0.0, ge=0)
    ell_max: float = 3.0
    ell_steps: int = Field(default=31, ge=1)
    side: Optional[Literal["above", "below", "avg"]] = None
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def _grid_ok(self):
        if self.y_max < self.y_min or self.ell_max < self.ell_min:
            raise ValueError("grid bounds must satisfy min <= max")
        ys = np.linspace(self.y_min, self.y_max, self.y_steps)
        if self.side is None and np.any(ys == 0.0):
            raise ValueError(
                "grid contains y=0 where the density is two-sided; pass side="
                "'above', 'below' or 'avg'"
            )
        return self


class SampleRequest(BaseModel):
    alpha: float = Field(gt=0, lt=1)
    x: float = 0.0
    t: float = Field(default=1.0, gt=0)
    n_samples: int = Field(default=1000, ge=1)
    seed: int = 0
    stream: int = 0
    format: Literal["csv", "json"] = "csv"


class SimulateRequest(BaseModel):
    alpha: float = Field(ge=0, le=1)  # walk admits the reflected limits 0, 1
    x: float = 0.0
    t: float = Field(default=1.0, gt=0)
    v: float = 0.0
    n: int = Field(default=1000, ge=100, description="lattice steps per unit time")
    n_paths: int = Field(default=1000, ge=1)
    seed: int = 0
    stream: int = 0
    format: Literal["csv", "json"] = "csv"


class CheckSpecModel(BaseModel):
    name: str
    kind: str
    params: dict = Field(default_factory=dict)
    seed: int = 0


class VerifyRequest(BaseModel):
    seed: int = 0
    names: Optional[list[str]] = None      # subset of the built-in suite
    checks: Optional[list[CheckSpecModel]] = None  # or a fully custom suite


app = FastAPI(title="skewbm", version=__version__)


@app.exception_handler(DomainError)
@app.exception_handler(ConfigError)
@app.exception_handler(QuadratureError)
async def _bad_request(request, exc):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(SamplerError)
async def _internal(request, exc):
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.get("/health")
def health():
    return {"name": "skewbm", "version": __version__}


@app.get("/checks")
def list_checks():
    return {"checks": verify.default_check_names()}


@app.post("/density")
def density_grid(req: DensityRequest):
    ys = np.linspace(req.y_min, req.y_max, req.y_steps)
    ells = np.linspace(req.ell_min, req.ell_max, req.ell_steps)
    yg = np.repeat(ys, ells.size)
    lg = np.tile(ells, ys.size)
    cont = density.joint_density_continuous(req.x, yg, lg, req.t, req.alpha, side=req.side)
    atom = density.atom_weight(req.x, yg, req.t)
    if req.format == "json":
        return {
            "y": yg.tolist(),
            "ell": lg.tolist(),
            "continuous": cont.tolist(),
            "atom": atom.tolist(),
        }
    return PlainTextResponse(
        _csv(["y", "ell", "continuous", "atom"], [yg, lg, cont, atom]),
        media_type="text/csv",
    )


@app.post("/sample")
def sample(req: SampleRequest):
    y, ell, hit = sampling.sample_joint_batch(
        req.x, req.t, req.alpha, RngStream(req.seed, req.stream), req.n_samples
    )
    hit_i = hit.astype(int)
    if req.format == "json":
        return {"y": y.tolist(), "ell": ell.tolist(), "hit": hit_i.tolist()}
    return PlainTextResponse(
        _csv(["y", "ell", "hit"], [y, ell, hit_i]), media_type="text/csv"
    )


@app.post("/simulate")
def simulate(req: SimulateRequest):
    term, loc, occ, _ = walk.simulate_batch_arrays(
        req.x, req.t, req.alpha, req.v, req.n, req.n_paths,
        RngStream(req.seed, req.stream),
    )
    if req.format == "json":
        return {
            "terminal": term.tolist(),
            "local_time": loc.tolist(),
            "occupation_pos": occ.tolist(),
        }
    return PlainTextResponse(
        _csv(["terminal", "local_time", "occupation_pos"], [term, loc, occ]),
        media_type="text/csv",
    )


@app.post("/verify")
def run_verification(req: VerifyRequest):
    if req.checks is not None:
        specs = [verify.CheckSpec.from_dict(c.model_dump()) for c in req.checks]
    else:
        specs = verify.default_suite(req.seed)
        if req.names is not None:
            wanted = set(req.names)
            known = {s.name for s in specs}
            missing = wanted - known
            if missing:
                raise ConfigError(f"unknown check names: {sorted(missing)}")
            specs = [s for s in specs if s.name in wanted]
    report = verify.run_checks(specs, base_seed=req.seed)
    return JSONResponse(content=report.to_dict())
