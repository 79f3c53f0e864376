"""JSON-over-HTTP interface.

Datasets are uploaded (CSV text or a synthetic spec) into an in-memory
store keyed by content hash, then referenced by id; audits may also
inline records directly. Responses reuse the same report builders and
serializer as the CLI, so identical inputs produce byte-identical
report JSON on either path.
"""

from __future__ import annotations

import threading
from typing import Optional, Union

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .data import (
    ClaimsDifferentiator,
    ClaimsKind,
    Dataset,
    GroupSpec,
    Record,
    SyntheticSpec,
    dataset_hash,
    generate_synthetic,
    parse_dataset_csv,
)
from .equivalence import classify_weights
from .errors import InvalidSpec, JustdistError, UndefinedResult, ValidationError
from .patterns import PatternKind, PatternSpec
from .report import (
    build_audit_report,
    build_classify_report,
    build_optimize_report,
    to_json_bytes,
)
from .rules import RuleKind, RuleSpace, optimize
from .utility import UtilityWeights, WeightTable


class UnknownDataset(JustdistError):
    def __init__(self, dataset_id: str):
        self.dataset_id = dataset_id
        super().__init__(f"no dataset with id {dataset_id!r}")


class DatasetStore:
    """In-memory datasets keyed by content hash; insert is atomic, so
    concurrent uploads of the same content agree on one entry."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[str, tuple[Dataset, int | None]] = {}

    def put(self, ds: Dataset, seed: int | None = None) -> str:
        key = dataset_hash(ds)
        with self._lock:
            self._entries.setdefault(key, (ds, seed))
        return key

    def get(self, dataset_id: str) -> tuple[Dataset, int | None]:
        with self._lock:
            if dataset_id not in self._entries:
                raise UnknownDataset(dataset_id)
            return self._entries[dataset_id]


class WeightTableModel(BaseModel):
    w11: float
    w10: float
    w01: float
    w00: float


class WeightsModel(WeightTableModel):
    per_group: Optional[dict[str, WeightTableModel]] = None


class ClaimsModel(BaseModel):
    kind: str = "none"
    attr: Optional[str] = None
    values: Optional[list[Union[int, str]]] = None


class PatternModel(BaseModel):
    kind: str
    k: Optional[float] = None
    t: Optional[float] = None


class RecordModel(BaseModel):
    id: Optional[str] = None
    a: Union[str, int]
    y: int
    d: int
    score: Optional[float] = None
    legit: Optional[dict[str, Union[str, int]]] = None


class GroupSpecModel(BaseModel):
    n: int
    base_rate: float
    accept_pos: float = 0.6
    accept_neg: float = 0.3


class SyntheticModel(BaseModel):
    groups: dict[str, GroupSpecModel]
    score_noise: float = 0.25
    legit: Optional[dict[str, list[str]]] = None
    seed: int = 0


class DatasetUpload(BaseModel):
    csv: Optional[str] = None
    synthetic: Optional[SyntheticModel] = None


class DatasetRefModel(BaseModel):
    dataset_id: Optional[str] = None
    records: Optional[list[RecordModel]] = None
    groups: Optional[list[str]] = None
    legit_schema: Optional[dict[str, list[str]]] = None


class AuditRequestModel(DatasetRefModel):
    weights: WeightsModel
    claims: ClaimsModel = ClaimsModel()
    patterns: Optional[list[PatternModel]] = None
    tol: float = 1e-9


class RuleSpaceModel(BaseModel):
    kind: str
    grid: Union[list[float], dict[str, list[float]]]


class OptimizeRequestModel(DatasetRefModel):
    weights: WeightsModel
    claims: ClaimsModel = ClaimsModel()
    objective: PatternModel
    rulespace: RuleSpaceModel
    include_frontier: bool = True
    tol: float = 1e-9


class ClassifyRequestModel(BaseModel):
    weights: WeightsModel
    claims: ClaimsModel = ClaimsModel()


def to_weights(m: WeightsModel) -> UtilityWeights:
    shared = WeightTable(w11=m.w11, w10=m.w10, w01=m.w01, w00=m.w00)
    per_group = None
    if m.per_group is not None:
        per_group = {
            str(a): WeightTable(w11=t.w11, w10=t.w10, w01=t.w01, w00=t.w00)
            for a, t in m.per_group.items()
        }
    return UtilityWeights(shared=shared, per_group=per_group)


def to_claims(m: ClaimsModel) -> ClaimsDifferentiator:
    try:
        kind = ClaimsKind(m.kind.strip().lower())
    except ValueError:
        raise InvalidSpec(
            f"claims kind must be one of none/outcome/decision/legitimate, got {m.kind!r}"
        ) from None
    if kind is ClaimsKind.NONE:
        return ClaimsDifferentiator.none()
    if m.values is None:
        raise InvalidSpec(f"claims kind {kind.value!r} needs values")
    if kind in (ClaimsKind.OUTCOME, ClaimsKind.DECISION):
        values = []
        for v in m.values:
            if v not in (0, 1):
                raise InvalidSpec(f"values for {kind.value!r} must be 0 or 1, got {v!r}")
            values.append(int(v))
        maker = (
            ClaimsDifferentiator.outcome
            if kind is ClaimsKind.OUTCOME
            else ClaimsDifferentiator.decision
        )
        return maker(values)
    if not m.attr:
        raise InvalidSpec("claims kind 'legitimate' needs an attribute name")
    return ClaimsDifferentiator.legitimate(m.attr, [str(v) for v in m.values])


def to_patterns(models: Optional[list[PatternModel]]) -> list[PatternSpec]:
    if models is None:
        return [PatternSpec(PatternKind.EGALITARIAN), PatternSpec(PatternKind.MAXIMIN)]
    specs = []
    for m in models:
        try:
            kind = PatternKind(m.kind.strip().lower())
        except ValueError:
            raise InvalidSpec(f"unknown pattern kind {m.kind!r}") from None
        specs.append(PatternSpec(kind=kind, k=m.k, t=m.t))
    if not specs:
        raise InvalidSpec("patterns list is empty")
    return specs


def to_synthetic_spec(m: SyntheticModel) -> SyntheticSpec:
    return SyntheticSpec(
        groups={
            str(a): GroupSpec(
                n=g.n, base_rate=g.base_rate, accept_pos=g.accept_pos, accept_neg=g.accept_neg
            )
            for a, g in m.groups.items()
        },
        score_noise=m.score_noise,
        legit={a: tuple(vs) for a, vs in m.legit.items()} if m.legit else None,
    )


def _records_from_models(models: list[RecordModel]) -> list[Record]:
    records = []
    for i, m in enumerate(models, start=1):
        legit = {k: str(v) for k, v in m.legit.items()} if m.legit else None
        records.append(
            Record(
                id=m.id if m.id is not None else str(i),
                a=str(m.a),
                y=m.y,
                d=m.d,
                score=m.score,
                legit=legit,
            )
        )
    return records


def _error_code(err: Exception) -> str:
    name = type(err).__name__
    out = []
    for i, ch in enumerate(name):
        if ch.isupper() and i > 0:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)


def create_app(store: DatasetStore | None = None) -> FastAPI:
    app = FastAPI(title="justdist", version="0.1.0", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    datasets = store if store is not None else DatasetStore()
    app.state.datasets = datasets

    def json_response(payload: dict, status_code: int = 200) -> Response:
        return Response(
            content=to_json_bytes(payload),
            status_code=status_code,
            media_type="application/json",
        )

    @app.exception_handler(RequestValidationError)
    async def on_request_validation(_req: Request, exc: RequestValidationError):
        fields = [
            {"loc": [str(part) for part in e["loc"]], "message": e["msg"]} for e in exc.errors()
        ]
        return json_response(
            {"error": {"code": "validation_error", "fields": fields}}, status_code=400
        )

    @app.exception_handler(UnknownDataset)
    async def on_unknown_dataset(_req: Request, exc: UnknownDataset):
        return json_response(
            {
                "error": {
                    "code": "unknown_dataset",
                    "message": str(exc),
                    "dataset_id": exc.dataset_id,
                }
            },
            status_code=404,
        )

    @app.exception_handler(UndefinedResult)
    async def on_undefined(_req: Request, exc: UndefinedResult):
        return json_response(
            {"error": {"code": _error_code(exc), "message": str(exc)}}, status_code=422
        )

    @app.exception_handler(JustdistError)
    async def on_domain_error(_req: Request, exc: JustdistError):
        return json_response(
            {"error": {"code": _error_code(exc), "message": str(exc)}}, status_code=400
        )

    def resolve_dataset(ref: DatasetRefModel) -> tuple[Dataset, int | None]:
        if (ref.dataset_id is None) == (ref.records is None):
            raise InvalidSpec("provide exactly one of dataset_id or records")
        if ref.dataset_id is not None:
            return datasets.get(ref.dataset_id)
        ds = Dataset.build(
            _records_from_models(ref.records),
            groups=ref.groups,
            legit_schema=ref.legit_schema,
        )
        return ds, None

    @app.post("/datasets")
    async def upload_dataset(body: DatasetUpload):
        if (body.csv is None) == (body.synthetic is None):
            raise InvalidSpec("provide exactly one of csv or synthetic")
        if body.csv is not None:
            ds = parse_dataset_csv(body.csv)
            seed = None
        else:
            seed = body.synthetic.seed
            ds = generate_synthetic(to_synthetic_spec(body.synthetic), seed=seed)
        dataset_id = datasets.put(ds, seed=seed)
        return json_response(
            {
                "dataset_id": dataset_id,
                "n_records": len(ds.records),
                "groups": list(ds.groups),
            },
            status_code=201,
        )

    @app.get("/datasets/{dataset_id}/summary")
    async def dataset_summary(dataset_id: str):
        ds, seed = datasets.get(dataset_id)
        return json_response({"dataset_id": dataset_id, "seed": seed, **ds.summary()})

    @app.post("/audit")
    async def audit(body: AuditRequestModel):
        ds, seed = resolve_dataset(body)
        report = build_audit_report(
            ds,
            weights=to_weights(body.weights),
            cd=to_claims(body.claims),
            patterns=to_patterns(body.patterns),
            tol=body.tol,
            seed=seed,
        )
        return json_response(report)

    @app.post("/optimize")
    async def optimize_rules(body: OptimizeRequestModel):
        ds, seed = resolve_dataset(body)
        try:
            rule_kind = RuleKind(body.rulespace.kind.strip().lower())
        except ValueError:
            raise InvalidSpec(
                f"rulespace kind must be group_rates or group_thresholds, "
                f"got {body.rulespace.kind!r}"
            ) from None
        grid = body.rulespace.grid
        if isinstance(grid, dict):
            grids = {str(a): tuple(vs) for a, vs in grid.items()}
        else:
            grids = {a: tuple(grid) for a in ds.groups}
        space = RuleSpace(kind=rule_kind, grids=grids)
        objective = to_patterns([body.objective])[0]
        weights = to_weights(body.weights)
        cd = to_claims(body.claims)
        result = optimize(
            ds, space, cd, weights, objective, include_frontier=body.include_frontier
        )
        report = build_optimize_report(
            result, ds, weights, cd, space, tol=body.tol, seed=seed
        )
        return json_response(report)

    @app.post("/classify-weights")
    async def classify(body: ClassifyRequestModel):
        weights = to_weights(body.weights)
        cd = to_claims(body.claims)
        finding = classify_weights(weights, cd)
        return json_response(build_classify_report(finding, weights))

    return app


app = create_app()
