"""Convert classical CARP benchmark files (gdb/bccm/eglese layouts) to instances."""

from __future__ import annotations

import random
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from arcfleet.core import Graph, Instance, ParseError, parse_time

_EDGE_RE = re.compile(
    r"\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*"
    r"(?:coste|cost)\s+(\d+(?:\.\d+)?)"
    r"(?:\s+(?:demanda|demand)\s+\d+(?:\.\d+)?)?",
    re.IGNORECASE,
)

_NODE_KEYS = {"VERTICES", "NODES", "N"}
_KNOWN_KEYS = _NODE_KEYS | {
    "NOMBRE", "NAME", "COMENTARIO", "COMMENT",
    "ARISTAS_REQ", "ARISTAS_NOREQ", "REQUIRED_EDGES", "NON_REQUIRED_EDGES",
    "VEHICULOS", "VEHICLES", "CAPACIDAD", "CAPACITY",
    "TIPO_COSTES_ARISTAS", "COSTE_TOTAL_REQ", "DEPOSITO", "DEPOT",
    "LISTA_ARISTAS_REQ", "LISTA_ARISTAS_NOREQ", "LIST_REQ_EDGES", "LIST_NOREQ_EDGES",
}


@dataclass
class CarpFile:
    """Raw benchmark content: name, vertex count, cost edges, header metadata."""

    name: str
    node_count: int
    edges: list[tuple[int, int, int]] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)


def parse_carp(text: str) -> CarpFile:
    """Header + edge-list parser; demands and service costs are discarded."""
    name = ""
    node_count = 0
    edges: list[tuple[int, int, int]] = []
    metadata: dict[str, str] = {}
    seen_edge_section = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        match = _EDGE_RE.search(line)
        if match:
            seen_edge_section = True
            u, v = int(match.group(1)), int(match.group(2))
            if u == 0 or v == 0:
                raise ParseError("node ids are 1-based", lineno)
            edges.append((u, v, parse_time(match.group(3), lineno)))
            continue
        key, sep, value = line.partition(":")
        if not sep:
            continue
        key_norm = key.strip().upper().replace(" ", "_").replace("-", "_")
        value = value.strip()
        metadata[key_norm] = value
        if key_norm in ("NOMBRE", "NAME"):
            name = value
        elif key_norm in _NODE_KEYS:
            try:
                node_count = int(value)
            except ValueError:
                raise ParseError(f"bad vertex count {value!r}", lineno) from None
        elif key_norm not in _KNOWN_KEYS and "EDGES" not in key_norm:
            warnings.warn(f"unknown header key {key.strip()!r} ignored", stacklevel=2)
    if not seen_edge_section:
        raise ParseError("missing edge section")
    if node_count == 0:
        node_count = max(max(u, v) for u, v, _ in edges)
    return CarpFile(name=name, node_count=node_count, edges=edges, metadata=metadata)


def _round_half_up(value: Fraction) -> int:
    return int(value + Fraction(1, 2))


def convert_to_instance(
    c: CarpFile,
    seed: int,
    depot_ratio: Fraction = Fraction(1, 5),
    required_ratio: Fraction = Fraction(1, 3),
) -> Instance:
    """Derive a rechargeable-fleet instance from a CARP graph.

    Depots and required edges are drawn uniformly without replacement, sized
    by the given ratios (floors of 2 and 1); the fleet gets one vehicle per
    two required edges, capacity twice the heaviest edge, and recharge twice
    the capacity.  Reproducible for a fixed seed.
    """
    graph = Graph(c.node_count, tuple(sorted(set(c.edges))))
    rng = random.Random(seed)
    n_depots = max(2, _round_half_up(depot_ratio * graph.node_count))
    n_depots = min(n_depots, graph.node_count)
    n_required = max(1, _round_half_up(required_ratio * len(graph.edges)))
    n_required = min(n_required, len(graph.edges))
    depots = sorted(rng.sample(sorted(graph.nodes()), n_depots))
    required = sorted(rng.sample(sorted(graph.edge_set()), n_required))
    vehicles = max(1, n_required // 2)
    capacity = 2 * max(w for _, _, w in graph.edges)
    return Instance(
        name=c.name or "carp",
        graph=graph,
        depots=tuple(depots),
        required=tuple(required),
        vehicle_count=vehicles,
        capacity=capacity,
        recharge=2 * capacity,
    )
