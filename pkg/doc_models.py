"""
JSON document schemas for matrices, exchange graphs, automorphism reports and
audit reports. Every index that appears in a document is 1-based (mutation
directions, bijections, paths); node ids are the 0-based BFS positions used as
DOT node names. Conversion to and from the 0-based Python API happens here.
"""

from __future__ import annotations

import json
import logging
from typing import Annotated, Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError, model_validator

from exchange_matrix import ExchangeMatrix, MatrixValidationError, check_sign_compatible
from laurent import LaurentParseError, parse, render
from seed_engine import ExchangeGraph, Seed, SeedKey, node_label

logger = logging.getLogger(__name__)


class DocumentError(ValueError):
    """Malformed JSON or a document that does not fit its schema"""


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    loc = ".".join(str(part) for part in first["loc"]) or "document"
    message = first["msg"]
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    return f"field {loc}: {message}"


def _load(model: type, text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise DocumentError(_describe(e)) from e


def dump(document: BaseModel, exclude_none: bool = False) -> str:
    """Stable, indented JSON text with a trailing newline"""
    return document.model_dump_json(indent=2, exclude_none=exclude_none) + "\n"


# ---------------------------
# Matrix document
# ---------------------------

class MatrixDocument(_Document):
    rank: StrictInt = Field(ge=1)
    matrix: List[List[StrictInt]]

    @model_validator(mode="after")
    def _check_shape(self) -> "MatrixDocument":
        if len(self.matrix) != self.rank:
            raise ValueError(f"rank is {self.rank} but matrix has {len(self.matrix)} rows")
        for i, row in enumerate(self.matrix):
            if len(row) != self.rank:
                raise ValueError(f"matrix is not square: row {i + 1} has {len(row)} entries")
        check_sign_compatible(tuple(tuple(row) for row in self.matrix))
        return self

    @classmethod
    def from_matrix(cls, matrix: ExchangeMatrix) -> "MatrixDocument":
        return cls(rank=matrix.n, matrix=matrix.to_rows())

    def to_matrix(self) -> ExchangeMatrix:
        """Raises NotSkewSymmetrizableError for sign-compatible but non-symmetrizable input"""
        return ExchangeMatrix.from_rows(self.matrix)


def load_matrix_document(text: str) -> MatrixDocument:
    return _load(MatrixDocument, text)


# ---------------------------
# Exchange graph document
# ---------------------------

NodeId = Annotated[StrictInt, Field(ge=0)]
Direction = Annotated[StrictInt, Field(ge=1)]


class SeedDocument(_Document):
    id: NodeId
    depth: NodeId
    cluster: List[str]
    matrix: List[List[StrictInt]]
    path: List[Direction]
    neighbors: List[Optional[NodeId]]


class EdgeDocument(_Document):
    source: NodeId
    target: NodeId
    direction: Direction


class GraphDocument(_Document):
    rank: StrictInt = Field(ge=1)
    complete: bool
    initial: NodeId = 0
    nodes: List[SeedDocument]
    edges: List[EdgeDocument]

    @model_validator(mode="after")
    def _check_node_shapes(self) -> "GraphDocument":
        for node in self.nodes:
            if len(node.neighbors) != self.rank:
                raise ValueError(
                    f"node {node.id} has {len(node.neighbors)} neighbors but rank is {self.rank}"
                )
            for k in node.path:
                if k > self.rank:
                    raise ValueError(f"node {node.id} path direction {k} out of range 1..{self.rank}")
        for edge in self.edges:
            if edge.direction > self.rank:
                raise ValueError(f"edge direction {edge.direction} out of range 1..{self.rank}")
        return self


def graph_document(graph: ExchangeGraph) -> GraphDocument:
    nodes = []
    for i, (key, seed) in enumerate(graph.nodes.items()):
        nodes.append(SeedDocument(
            id=i,
            depth=graph.depth(key),
            cluster=[render(x) for x in seed.cluster],
            matrix=seed.matrix.to_rows(),
            path=[k + 1 for k in seed.path],
            neighbors=[graph.index_of(t) if t is not None else None for t in graph.edges[key]],
        ))
    edges = [EdgeDocument(source=u, target=v, direction=k + 1) for u, v, k in graph.edge_list()]
    return GraphDocument(
        rank=graph.rank,
        complete=graph.complete,
        initial=graph.index_of(graph.initial),
        nodes=nodes,
        edges=edges,
    )


def graph_from_document(doc: GraphDocument) -> ExchangeGraph:
    """Rebuild the in-memory graph; equal to the exported one"""
    seeds: List[Seed] = []
    try:
        for node in doc.nodes:
            cluster = tuple(parse(text, doc.rank) for text in node.cluster)
            seeds.append(Seed(cluster, ExchangeMatrix.from_rows(node.matrix), tuple(k - 1 for k in node.path)))
    except (LaurentParseError, MatrixValidationError, ValueError) as e:
        raise DocumentError(f"invalid seed in graph document: {e}") from e

    keys: List[SeedKey] = [seed.key for seed in seeds]
    if len(set(keys)) != len(keys):
        raise DocumentError("graph document lists the same unlabeled seed twice")
    try:
        nodes = {key: seed for key, seed in zip(keys, seeds)}
        edges = {
            key: [keys[t] if t is not None else None for t in node.neighbors]
            for key, node in zip(keys, doc.nodes)
        }
        depths = {key: node.depth for key, node in zip(keys, doc.nodes)}
        initial = keys[doc.initial]
    except IndexError as e:
        raise DocumentError(f"graph document refers to an unknown node: {e}") from e
    return ExchangeGraph(doc.rank, nodes, edges, initial, doc.complete, depths)


def load_graph_document(text: str) -> GraphDocument:
    return _load(GraphDocument, text)


# ---------------------------
# Automorphism reports
# ---------------------------

class HomDocument(_Document):
    images: List[str]
    sigma: List[StrictInt]
    sign: Optional[List[StrictInt]]
    verified: str
    target: str

    def image_polynomials(self) -> tuple:
        """Parsed images; equal to the `images` of the hom this came from"""
        try:
            return tuple(parse(text, len(self.images)) for text in self.images)
        except LaurentParseError as e:
            raise DocumentError(f"invalid image in hom document: {e}") from e


def load_hom_document(text: str) -> HomDocument:
    return _load(HomDocument, text)


class AutomorphismReport(_Document):
    rank: StrictInt
    order: StrictInt
    identity: Optional[StrictInt]
    closed: bool
    elements: List[HomDocument]
    table: List[List[Optional[StrictInt]]]
    mixed_sign: List[StrictInt] = Field(default_factory=list)


def hom_document(h) -> HomDocument:
    return HomDocument(
        images=[render(x) for x in h.images],
        sigma=[s + 1 for s in h.sigma],
        sign=list(h.sign.a) if h.sign is not None else None,
        verified=h.verified.value,
        target=node_label(h.target_key),
    )


def automorphism_report(group) -> AutomorphismReport:
    return AutomorphismReport(
        rank=group.elements[0].n if group.elements else 0,
        order=group.order,
        identity=group.identity,
        closed=group.is_closed(),
        elements=[hom_document(h) for h in group.elements],
        table=group.table,
        mixed_sign=group.mixed_sign_elements(),
    )


def load_automorphism_report(text: str) -> AutomorphismReport:
    return _load(AutomorphismReport, text)


# ---------------------------
# Audit report
# ---------------------------

class AuditDocument(_Document):
    subject: str
    instances_checked: StrictInt
    complete: bool
    passed: bool
    violations: List[Dict[str, Any]]
    elapsed: Optional[float] = None


def load_audit_document(text: str) -> AuditDocument:
    return _load(AuditDocument, text)


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))
