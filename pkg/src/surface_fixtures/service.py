"""Session-oriented HTTP API for the annotate -> solve -> inspect loop.

Sessions live in memory. Within a session, label patches and solves are
serialized by an exclusive lock; the fixture cache is keyed by the spec
hash plus the labeling version, so a label change invalidates it.

Binary framing for point/field payloads (application/octet-stream, all
little-endian): the requested fields are concatenated in request order,
each as a contiguous typed array —
    pos    float32 x,y,z per point
    color  uint8 r,g,b per point (zeros when the cloud has no colors)
    normal float32 nx,ny,nz per point
    label  int32 per point
Scalar fixture payloads are float64 per point (NaN where undefined);
vector payloads are float64 x,y,z per point (NaN where undefined),
byte-identical to the corresponding write_field columns.
"""

import hashlib
import json
import tempfile
import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import geometry, plyio, segmentation, specfile
from .errors import SolverDivergence, SurfaceFixtureError
from .fixtures import (
    GuidanceFixture,
    ValueFixture,
    build_guidance_fixture,
    build_value_fixture,
    query,
    simulate_agents,
)
from .operators import assemble_laplacian

DEFAULT_TTL_SECONDS = 3600.0


@dataclass
class Session:
    id: str
    cloud: object
    labeling: object
    version: int = 0
    operator: object = None
    fixtures: dict = field(default_factory=dict)  # fixture_id -> fixture
    cache: dict = field(default_factory=dict)  # (spec_hash, version) -> fixture_id
    lock: threading.Lock = field(default_factory=threading.Lock)
    created: float = field(default_factory=time.time)
    last_used: float = field(default_factory=time.time)


def _spec_hash(doc):
    return hashlib.sha256(
        json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()[:16]


def create_app(ttl_seconds=DEFAULT_TTL_SECONDS):
    app = FastAPI(title="surface-fixtures service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions = {}
    registry_lock = threading.Lock()

    def get_session(session_id):
        with registry_lock:
            now = time.time()
            expired = [
                sid for sid, s in sessions.items()
                if now - s.last_used > ttl_seconds
            ]
            for sid in expired:
                del sessions[sid]
            session = sessions.get(session_id)
            if session is None:
                raise HTTPException(404, detail=_err("not_found", "unknown session"))
            session.last_used = now
            return session

    def _err(code, message, detail=None):
        return {"code": code, "message": message, "detail": detail}

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.body()
        try:
            with tempfile.NamedTemporaryFile(suffix=".ply") as tmp:
                tmp.write(body)
                tmp.flush()
                positions, labels, colors = plyio.read_cloud(tmp.name)
            k = min(12, max(1, len(positions) - 1))
            cloud = geometry.build_cloud(positions, colors=colors, k=k)
            labeling = segmentation.apply_labels(cloud, labels[: cloud.point_count])
        except (SurfaceFixtureError, ValueError) as exc:
            raise HTTPException(400, detail=_err("parse_error", str(exc)))
        session = Session(id=uuid.uuid4().hex, cloud=cloud, labeling=labeling)
        with registry_lock:
            sessions[session.id] = session
        return {
            "session_id": session.id,
            "n_points": cloud.point_count,
            "h": cloud.mean_spacing,
        }

    @app.get("/sessions/{session_id}/points")
    def get_points(session_id: str, fields: str = "pos,label"):
        session = get_session(session_id)
        cloud = session.cloud
        chunks = []
        for name in fields.split(","):
            name = name.strip()
            if name == "pos":
                chunks.append(cloud.positions.astype("<f4").tobytes())
            elif name == "color":
                colors = (
                    cloud.colors
                    if cloud.colors is not None
                    else np.zeros((cloud.point_count, 3), dtype=np.uint8)
                )
                chunks.append(colors.astype("u1").tobytes())
            elif name == "normal":
                geometry.estimate_frames(cloud)
                chunks.append(cloud.normals().astype("<f4").tobytes())
            elif name == "label":
                chunks.append(session.labeling.region_of.astype("<i4").tobytes())
            else:
                raise HTTPException(
                    422, detail=_err("bad_field", f"unknown field '{name}'")
                )
        return Response(
            content=b"".join(chunks),
            media_type="application/octet-stream",
            headers={"X-Version": str(session.version)},
        )

    @app.patch("/sessions/{session_id}/labels")
    async def patch_labels(session_id: str, request: Request):
        session = get_session(session_id)
        body = await request.json()
        indices = body.get("indices")
        region = body.get("region")
        expected = body.get("version")
        if not isinstance(indices, list) or not isinstance(region, int):
            raise HTTPException(
                422, detail=_err("bad_request", "need {indices: [...], region: int}")
            )
        with session.lock:
            if expected is not None and expected != session.version:
                raise HTTPException(
                    409,
                    detail=_err(
                        "version_conflict",
                        f"expected version {expected}, current {session.version}",
                    ),
                )
            labels = session.labeling.region_of.copy()
            idx = np.asarray(indices, dtype=np.int64)
            if len(idx) and (idx.min() < 0 or idx.max() >= session.cloud.point_count):
                raise HTTPException(
                    422, detail=_err("bad_index", "point index out of range")
                )
            labels[idx] = region
            # keep ids contiguous: compact if the patch removed a region
            ids = np.unique(labels)
            remap = {old: new for new, old in enumerate(ids)}
            if ids[0] != 0 or len(ids) != ids[-1] + 1:
                labels = np.array([remap[v] for v in labels], dtype=np.int64)
            try:
                session.labeling = segmentation.apply_labels(session.cloud, labels)
            except SurfaceFixtureError as exc:
                raise HTTPException(422, detail=_err("bad_labels", str(exc)))
            session.version += 1
            return {"version": session.version}

    @app.post("/sessions/{session_id}/solve")
    async def solve(session_id: str, request: Request):
        session = get_session(session_id)
        doc = await request.json()
        with session.lock:
            key = (_spec_hash(doc), session.version)
            t0 = time.perf_counter()
            if key in session.cache:
                fixture_id = session.cache[key]
                fixture = session.fixtures[fixture_id]
                cached = True
            else:
                try:
                    spec, options = specfile.parse_spec(doc)
                    specfile.resolve_params(
                        spec, options, session.cloud.mean_spacing
                    )
                    spec.validate(session.labeling.region_count)
                    geometry.estimate_frames(session.cloud)
                    if session.operator is None:
                        session.operator = assemble_laplacian(session.cloud)
                    if spec.kind == "value":
                        fixture = build_value_fixture(
                            session.cloud, session.labeling, spec,
                            operator=session.operator,
                        )
                    else:
                        fixture = build_guidance_fixture(
                            session.cloud, session.labeling, spec,
                            operator=session.operator,
                        )
                except SolverDivergence as exc:
                    raise HTTPException(
                        500, detail=_err("solver_divergence", str(exc))
                    )
                except (SurfaceFixtureError, ValueError) as exc:
                    raise HTTPException(422, detail=_err("invalid_spec", str(exc)))
                fixture_id = f"{key[0]}-v{session.version}"
                session.fixtures[fixture_id] = fixture
                session.cache[key] = fixture_id
                cached = False
            solve_ms = (time.perf_counter() - t0) * 1000
            n = session.cloud.point_count
            if isinstance(fixture, ValueFixture):
                undefined = int((~fixture.field.defined_mask(n)).sum())
                scalar = fixture.field
            else:
                free = session.labeling.region_of == 0
                undefined = int(
                    (free & ~fixture.free_field.defined_mask(n)).sum()
                )
                scalar = fixture.free_scalar
            defined_values = scalar.values[scalar.defined_mask(n)]
            return {
                "fixture_id": fixture_id,
                "undefined_count": undefined,
                "solve_ms": solve_ms,
                "cached": cached,
                "scalar_min": float(defined_values.min()) if len(defined_values) else None,
                "scalar_max": float(defined_values.max()) if len(defined_values) else None,
            }

    def get_fixture(session, fixture_id):
        fixture = session.fixtures.get(fixture_id)
        if fixture is None:
            raise HTTPException(404, detail=_err("not_found", "unknown fixture"))
        return fixture

    @app.get("/sessions/{session_id}/fixtures/{fixture_id}/scalar")
    def fixture_scalar(session_id: str, fixture_id: str):
        session = get_session(session_id)
        fixture = get_fixture(session, fixture_id)
        n = session.cloud.point_count
        scalar = (
            fixture.field if isinstance(fixture, ValueFixture) else fixture.free_scalar
        )
        u = scalar.values.astype("<f8").copy()
        u[~scalar.defined_mask(n)] = np.nan
        return Response(u.tobytes(), media_type="application/octet-stream")

    @app.get("/sessions/{session_id}/fixtures/{fixture_id}/vectors")
    def fixture_vectors(session_id: str, fixture_id: str):
        session = get_session(session_id)
        fixture = get_fixture(session, fixture_id)
        if not isinstance(fixture, GuidanceFixture):
            raise HTTPException(
                422, detail=_err("wrong_kind", "value fixtures have no vector field")
            )
        n = session.cloud.point_count
        vectors = fixture.free_field.vectors.astype("<f8").copy()
        vectors[~fixture.free_field.defined_mask(n)] = np.nan
        return Response(vectors.tobytes(), media_type="application/octet-stream")

    @app.post("/sessions/{session_id}/fixtures/{fixture_id}/query")
    async def fixture_query(session_id: str, fixture_id: str, request: Request):
        session = get_session(session_id)
        fixture = get_fixture(session, fixture_id)
        body = await request.json()
        positions = body.get("positions")
        if not isinstance(positions, list):
            raise HTTPException(
                422, detail=_err("bad_request", "need {positions: [[x,y,z],...]}")
            )
        out = []
        for p in positions:
            r = query(fixture, np.asarray(p, dtype=np.float64))
            out.append(
                {
                    "region": r.region,
                    "footpoint": [float(v) for v in r.footpoint],
                    "defined": r.defined,
                    "value": r.value,
                    "direction": (
                        [float(v) for v in r.direction]
                        if r.direction is not None
                        else None
                    ),
                }
            )
        return {"responses": out}

    @app.post("/sessions/{session_id}/fixtures/{fixture_id}/simulate")
    async def fixture_simulate(session_id: str, fixture_id: str, request: Request):
        session = get_session(session_id)
        fixture = get_fixture(session, fixture_id)
        if not isinstance(fixture, GuidanceFixture):
            raise HTTPException(
                422, detail=_err("wrong_kind", "simulation needs a guidance fixture")
            )
        body = await request.json()
        starts = body.get("starts", 20)
        step = body.get("step") or session.cloud.mean_spacing
        max_steps = int(body.get("max_steps", 1000))
        seed = body.get("seed")
        if isinstance(starts, int):
            rng = np.random.default_rng(seed)
            free = np.flatnonzero(session.labeling.region_of == 0)
            starts = rng.choice(free, size=min(starts, len(free)), replace=False)
        try:
            trajectories = simulate_agents(
                session.cloud, fixture, starts, float(step), max_steps
            )
        except (SurfaceFixtureError, ValueError) as exc:
            raise HTTPException(422, detail=_err("bad_request", str(exc)))
        return {
            "trajectories": [
                {
                    "points": t.points.tolist(),
                    "outcome": t.outcome,
                    "nearest_indices": t.nearest_indices.tolist(),
                }
                for t in trajectories
            ]
        }

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        with registry_lock:
            if session_id not in sessions:
                raise HTTPException(404, detail=_err("not_found", "unknown session"))
            del sessions[session_id]
        return {"deleted": session_id}

    return app
