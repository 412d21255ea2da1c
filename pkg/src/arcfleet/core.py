"""Graph, time and instance model for multi-depot arc routing with rechargeable vehicles.

All durations are exact integers counted in *millitime*: one time unit in an
input file equals 1000 millitime.  Input decimals carry at most three
fractional digits, so every legal literal converts losslessly and all time
arithmetic in the library is plain integer arithmetic.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

MILLI = 1000

Edge = tuple[int, int]


class ParseError(ValueError):
    """Malformed input text; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ValueError):
    """A structural invariant of an instance, plan or scenario is violated."""


class InfeasibleError(RuntimeError):
    """No feasible construction exists for the requested operation."""


def parse_time(text: str, line: int | None = None) -> int:
    """Convert a decimal literal with at most 3 fractional digits to millitime."""
    text = text.strip()
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    whole, dot, frac = text.partition(".")
    if not whole and not frac:
        raise ParseError(f"empty time literal {text!r}", line)
    if frac and len(frac) > 3:
        raise ParseError(f"time literal {text!r} has more than 3 fractional digits", line)
    try:
        value = int(whole or "0") * MILLI + (int(frac.ljust(3, "0")) if frac else 0)
    except ValueError:
        raise ParseError(f"bad time literal {text!r}", line) from None
    return sign * value


def format_time(mt: int) -> str:
    """Render millitime as the shortest exact decimal ('11.8', '7', '0.045')."""
    sign = "-" if mt < 0 else ""
    mt = abs(mt)
    whole, frac = divmod(mt, MILLI)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:03d}".rstrip("0")


def canonical_edge(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected weighted connected graph with 1-based node ids.

    Edge weights are traversal times in millitime.  The adjacency structure is
    derived at construction; instances are immutable and safe to share.
    """

    node_count: int
    edges: tuple[tuple[int, int, int], ...]
    adjacency: dict[int, tuple[tuple[int, int], ...]] = field(
        init=False, repr=False, compare=False
    )
    _weights: dict[Edge, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise ValidationError("graph must have at least one node")
        weights: dict[Edge, int] = {}
        adj: dict[int, list[tuple[int, int]]] = {n: [] for n in self.nodes()}
        for u, v, w in self.edges:
            if u == v:
                raise ValidationError(f"self-loop ({u},{v})")
            for n in (u, v):
                if not 1 <= n <= self.node_count:
                    raise ValidationError(f"node id {n} out of range 1..{self.node_count}")
            if w <= 0:
                raise ValidationError(f"edge ({u},{v}) has non-positive weight")
            e = canonical_edge(u, v)
            if e in weights:
                raise ValidationError(f"duplicate edge ({u},{v})")
            weights[e] = w
            adj[u].append((v, w))
            adj[v].append((u, w))
        object.__setattr__(self, "_weights", weights)
        object.__setattr__(
            self, "adjacency", {n: tuple(sorted(nbrs)) for n, nbrs in adj.items()}
        )
        if self.edges:
            self._check_connected()

    def _check_connected(self):
        seen = {1}
        stack = [1]
        while stack:
            for nbr, _ in self.adjacency[stack.pop()]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        if len(seen) != self.node_count:
            raise ValidationError("graph disconnected")

    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def has_edge(self, u: int, v: int) -> bool:
        return canonical_edge(u, v) in self._weights

    def weight(self, u: int, v: int) -> int:
        try:
            return self._weights[canonical_edge(u, v)]
        except KeyError:
            raise ValidationError(f"no edge ({u},{v})") from None

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self._weights)


def shortest_path(g: Graph, src: int, dst: int) -> tuple[int, list[int]]:
    """Minimum-time walk between two nodes.

    Ties between equal-time paths break toward the lexicographically smallest
    node sequence, which keeps every caller deterministic.
    """
    if not (1 <= src <= g.node_count and 1 <= dst <= g.node_count):
        raise ValidationError(f"node out of range: {src} or {dst}")
    if src == dst:
        return 0, [src]
    heap: list[tuple[int, tuple[int, ...]]] = [(0, (src,))]
    settled: set[int] = set()
    while heap:
        dist, path = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == dst:
            return dist, list(path)
        for nbr, w in g.adjacency[node]:
            if nbr not in settled:
                heapq.heappush(heap, (dist + w, path + (nbr,)))
    raise ValidationError(f"no path from {src} to {dst}")


def shortest_distances(g: Graph, src: int) -> dict[int, int]:
    """Dijkstra distances from one source to every node."""
    dist = {src: 0}
    heap = [(0, src)]
    settled: set[int] = set()
    while heap:
        d, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        for nbr, w in g.adjacency[node]:
            nd = d + w
            if nd < dist.get(nbr, nd + 1):
                dist[nbr] = nd
                heapq.heappush(heap, (nd, nbr))
    return dist


def graph_diameter(g: Graph) -> int:
    """Maximum shortest-path time over all node pairs."""
    best = 0
    for src in g.nodes():
        best = max(best, max(shortest_distances(g, src).values()))
    return best


@dataclass(frozen=True)
class Instance:
    """A routing problem: graph, depots, required edges and fleet parameters.

    ``capacity`` bounds each trip's duration, ``recharge`` is the pause between
    consecutive trips of one vehicle, and ``start_depots[k]`` is where vehicle
    ``k`` begins.  ``max_trips`` only feeds the MILP emitter.
    """

    name: str
    graph: Graph
    depots: tuple[int, ...]
    required: tuple[Edge, ...]
    vehicle_count: int
    capacity: int
    recharge: int
    speed: Fraction = Fraction(1)
    start_depots: tuple[int, ...] = ()
    max_trips: int = 0

    def __post_init__(self):
        if self.vehicle_count < 1:
            raise ValidationError("vehicle count must be positive")
        if self.capacity <= 0:
            raise ValidationError("capacity must be positive")
        if self.recharge < 0:
            raise ValidationError("recharge time must be non-negative")
        if self.speed <= 0:
            raise ValidationError("speed must be positive")
        if not self.depots:
            raise ValidationError("at least one depot required")
        depot_set = set(self.depots)
        if len(depot_set) != len(self.depots):
            raise ValidationError("duplicate depot")
        for d in self.depots:
            if not 1 <= d <= self.graph.node_count:
                raise ValidationError(f"depot {d} is not a node")
        object.__setattr__(self, "depots", tuple(sorted(depot_set)))
        if not self.required:
            raise ValidationError("at least one required edge")
        canon = []
        for u, v in self.required:
            e = canonical_edge(u, v)
            if not self.graph.has_edge(*e):
                raise ValidationError(f"required edge ({u},{v}) not in edge set")
            if self.graph.weight(*e) > self.capacity:
                raise ValidationError(f"required edge ({u},{v}) weight exceeds capacity")
            canon.append(e)
        if len(set(canon)) != len(canon):
            raise ValidationError("duplicate required edge")
        object.__setattr__(self, "required", tuple(sorted(set(canon))))
        if not self.start_depots:
            cyclic = tuple(
                self.depots[k % len(self.depots)] for k in range(self.vehicle_count)
            )
            object.__setattr__(self, "start_depots", cyclic)
        if len(self.start_depots) != self.vehicle_count:
            raise ValidationError("need one start depot per vehicle")
        for d in self.start_depots:
            if d not in depot_set:
                raise ValidationError(f"start depot {d} is not a depot")
        if self.max_trips <= 0:
            total = sum(w for _, _, w in self.graph.edges)
            object.__setattr__(
                self,
                "max_trips",
                math.ceil(total / self.capacity) + len(self.required),
            )

    @property
    def required_set(self) -> frozenset[Edge]:
        return frozenset(self.required)


def _tokenize(text: str):
    """Yield (line_number, tokens) for non-empty lines, '#' starts a comment."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_instance(text: str) -> Instance:
    """Parse the line-oriented instance format (see `serialize_instance`)."""
    lines = list(_tokenize(text))
    pos = 0
    name = ""
    node_count = None
    depots: list[int] = []
    start: list[int] = []
    edges: list[tuple[int, int, int]] = []
    required: list[Edge] = []
    vehicles = None
    capacity = None
    recharge = None
    speed = Fraction(1)

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise ParseError("unexpected end of file")
        item = lines[pos]
        pos += 1
        return item

    def parse_int(tok: str, lineno: int, what: str) -> int:
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"bad {what} {tok!r}", lineno) from None

    while pos < len(lines):
        lineno, toks = take()
        key = toks[0]
        if key == "NAME":
            name = " ".join(toks[1:])
        elif key == "NODES":
            node_count = parse_int(toks[1], lineno, "node count")
        elif key == "DEPOTS":
            depots = [parse_int(t, lineno, "depot id") for t in toks[1:]]
        elif key == "START":
            start = [parse_int(t, lineno, "start depot") for t in toks[1:]]
        elif key == "VEHICLES":
            vehicles = parse_int(toks[1], lineno, "vehicle count")
        elif key == "CAPACITY":
            capacity = parse_time(toks[1], lineno)
        elif key == "RECHARGE":
            recharge = parse_time(toks[1], lineno)
        elif key == "SPEED":
            speed = Fraction(parse_time(toks[1], lineno), MILLI)
        elif key == "EDGES":
            m = parse_int(toks[1], lineno, "edge count")
            for _ in range(m):
                lineno, toks = take()
                if len(toks) != 3:
                    raise ParseError("edge line needs '<u> <v> <weight>'", lineno)
                u = parse_int(toks[0], lineno, "node id")
                v = parse_int(toks[1], lineno, "node id")
                length = parse_time(toks[2], lineno)
                time = Fraction(length) / speed if speed != 1 else Fraction(length)
                if time.denominator != 1:
                    raise ParseError(
                        f"speed {speed} does not divide edge ({u},{v}) into whole millitime",
                        lineno,
                    )
                edges.append((u, v, int(time)))
        elif key == "REQUIRED":
            r = parse_int(toks[1], lineno, "required count")
            for _ in range(r):
                lineno, toks = take()
                if len(toks) != 2:
                    raise ParseError("required line needs '<u> <v>'", lineno)
                u = parse_int(toks[0], lineno, "node id")
                v = parse_int(toks[1], lineno, "node id")
                if u == v:
                    raise ParseError(f"self-loop ({u},{v})", lineno)
                required.append((u, v))
        else:
            raise ParseError(f"unknown keyword {key!r}", lineno)

    for label, value in (("NODES", node_count), ("VEHICLES", vehicles),
                         ("CAPACITY", capacity), ("RECHARGE", recharge)):
        if value is None:
            raise ParseError(f"missing {label} declaration")
    if not depots:
        raise ParseError("missing DEPOTS declaration")
    if not edges:
        raise ParseError("missing EDGES declaration")
    graph = Graph(node_count, tuple(edges))
    return Instance(
        name=name,
        graph=graph,
        depots=tuple(depots),
        required=tuple(required),
        vehicle_count=vehicles,
        capacity=capacity,
        recharge=recharge,
        speed=speed,
        start_depots=tuple(start),
    )


def serialize_instance(inst: Instance) -> str:
    """Canonical text form; `parse_instance` round-trips it exactly."""
    out = [f"NAME {inst.name}", f"NODES {inst.graph.node_count}"]
    out.append("DEPOTS " + " ".join(str(d) for d in inst.depots))
    out.append("START " + " ".join(str(d) for d in inst.start_depots))
    out.append(f"VEHICLES {inst.vehicle_count}")
    out.append(f"CAPACITY {format_time(inst.capacity)}")
    out.append(f"RECHARGE {format_time(inst.recharge)}")
    out.append(f"SPEED {format_time(int(inst.speed * MILLI))}")
    out.append(f"EDGES {len(inst.graph.edges)}")
    for u, v, w in sorted(inst.graph.edges):
        length = Fraction(w) * inst.speed
        out.append(f"{u} {v} {format_time(int(length))}")
    out.append(f"REQUIRED {len(inst.required)}")
    for u, v in inst.required:
        out.append(f"{u} {v}")
    return "\n".join(out) + "\n"
