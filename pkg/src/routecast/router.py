"""Negotiated-congestion routing over the channel-segment graph.

Every iteration rips up all nets and re-routes them one at a time (bounding
box descending, ties by id) with Dijkstra expansions that grow each net's
route tree source-set style: the finished part of the tree seeds the next
search at zero cost, so multi-sink nets reuse their own wiring. Entering a
channel segment costs

    1 + pres_fac * max(0, used + 1 - capacity) + history

where `used` counts nets committed so far in this iteration. After an
iteration with overuse, history picks up hist_fac * overuse per offending
segment and pres_fac is multiplied up, the usual schedule that starts
near-greedy and turns congestion-averse.

Pin nodes carry no cost and are only enterable as search targets, so paths
cannot tunnel through logic tiles.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arch import Floorplan, RoutingGraph, routing_graph
from .errors import ArtifactIOError, ValidationError
from .netlist import Netlist
from .placer import Placement, validate_placement


@dataclass(frozen=True)
class RouteConfig:
    max_iters: int = 30
    pres_fac_init: float = 0.5
    pres_fac_mult: float = 1.6
    hist_fac: float = 0.2
    seed: int = 0  # reserved; the router is fully deterministic

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.pres_fac_init <= 0 or self.pres_fac_mult < 1.0 or self.hist_fac < 0:
            raise ValidationError("pres_fac_init > 0, pres_fac_mult >= 1, hist_fac >= 0 required")


@dataclass(frozen=True)
class NetRoute:
    net_id: str
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    segments: tuple[int, ...]


@dataclass
class ChannelUtilization:
    """Per-segment utilization u = used / capacity.

    h has shape (rows+1, cols): one row per horizontal channel, top first.
    v has shape (rows, cols+1): one row per interior tile row.
    """

    h: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        if self.h.ndim != 2 or self.v.ndim != 2:
            raise ValidationError("utilization matrices must be 2-d")
        rows = self.v.shape[0]
        cols = self.h.shape[1]
        if self.h.shape != (rows + 1, cols) or self.v.shape != (rows, cols + 1):
            raise ValidationError(
                f"inconsistent utilization shapes h{self.h.shape} v{self.v.shape}"
            )
        if (self.h < 0).any() or (self.v < 0).any():
            raise ValidationError("utilization must be non-negative")

    @property
    def rows(self) -> int:
        return self.v.shape[0]

    @property
    def cols(self) -> int:
        return self.h.shape[1]

    def values(self) -> np.ndarray:
        return np.concatenate([self.h.ravel(), self.v.ravel()])

    def to_csv(self) -> str:
        lines = ["kind,x,y,u"]
        for hy in range(self.rows + 1):
            for sx in range(self.cols):
                lines.append(f"h,{sx},{hy},{self.h[hy, sx]:.6f}")
        for sy in range(self.rows):
            for vx in range(self.cols + 1):
                lines.append(f"v,{vx},{sy},{self.v[sy, vx]:.6f}")
        return "\n".join(lines) + "\n"

    def save_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "ChannelUtilization":
        h_cells: dict[tuple[int, int], float] = {}
        v_cells: dict[tuple[int, int], float] = {}
        lines = text.strip().splitlines()
        if not lines or lines[0].strip() != "kind,x,y,u":
            raise ValidationError("utilization csv must start with header 'kind,x,y,u'")
        for ln, raw in enumerate(lines[1:], start=2):
            parts = raw.strip().split(",")
            if len(parts) != 4:
                raise ValidationError(f"line {ln}: expected 4 csv fields")
            kind, xs, ys, us = parts
            try:
                x, y, u = int(xs), int(ys), float(us)
            except ValueError as e:
                raise ValidationError(f"line {ln}: {e}") from e
            if kind == "h":
                h_cells[(x, y)] = u
            elif kind == "v":
                v_cells[(x, y)] = u
            else:
                raise ValidationError(f"line {ln}: kind must be 'h' or 'v', got {kind!r}")
        if not h_cells or not v_cells:
            raise ValidationError("utilization csv needs both h and v entries")
        cols = max(x for x, _ in h_cells) + 1
        rows = max(y for _, y in h_cells)
        h = np.full((rows + 1, cols), -1.0)
        v = np.full((rows, cols + 1), -1.0)
        for (x, y), u in h_cells.items():
            if not (0 <= x < cols and 0 <= y <= rows):
                raise ValidationError(f"h entry ({x},{y}) out of range")
            h[y, x] = u
        for (x, y), u in v_cells.items():
            if not (0 <= x <= cols and 0 <= y < rows):
                raise ValidationError(f"v entry ({x},{y}) out of range")
            v[y, x] = u
        if (h < 0).any() or (v < 0).any():
            raise ValidationError("utilization csv has missing cells")
        return cls(h, v)

    @classmethod
    def load_csv(cls, path: str | Path) -> "ChannelUtilization":
        p = Path(path)
        if not p.exists():
            raise ArtifactIOError(f"utilization file not found: {p}")
        return cls.from_csv(p.read_text())


@dataclass
class RoutingResult:
    routes: dict[str, NetRoute]
    used: np.ndarray  # per segment node, ints
    capacity: int
    overflow: bool
    iterations: int
    overuse_history: list[int] = field(default_factory=list)
    graph: RoutingGraph | None = None

    def utilization(self) -> ChannelUtilization:
        g = self.graph
        fp = g.fp
        u = self.used.astype(np.float64) / float(self.capacity)
        h = u[: g.n_h].reshape(fp.rows + 1, fp.cols)
        v = u[g.n_h : g.n_h + g.n_v].reshape(fp.rows, fp.cols + 1)
        return ChannelUtilization(h, v)


def _net_order(netlist: Netlist, placement: Placement) -> list[int]:
    # biggest bounding box first; deterministic tie-break on id
    keyed = []
    for i, net in enumerate(netlist.nets):
        xs, ys = [], []
        for b in {net.driver, *net.sinks}:
            x, y, _ = placement.assignment[b]
            xs.append(x)
            ys.append(y)
        bbox = (max(xs) - min(xs)) + (max(ys) - min(ys))
        keyed.append((-bbox, net.id, i))
    return [i for _, _, i in sorted(keyed)]


def route(
    netlist: Netlist,
    placement: Placement,
    fp: Floorplan,
    config: RouteConfig = RouteConfig(),
) -> RoutingResult:
    """Route every net; deterministic. Sets overflow if congestion remains."""
    validate_placement(placement, netlist, fp)
    g = routing_graph(fp)
    n_seg = g.n_segments
    seg_cap = float(fp.channel_capacity)

    terminals: list[tuple[int, frozenset[int]]] = []
    for net in netlist.nets:
        d = placement.tile_of(net.driver)
        dp = g.pin_node(*d)
        sink_pins = frozenset(g.pin_node(*placement.tile_of(s)) for s in net.sinks) - {dp}
        terminals.append((dp, sink_pins))

    order = _net_order(netlist, placement)
    is_pin = g.node_kind == 2  # NODE_PIN
    hist = np.zeros(n_seg, dtype=np.float64)
    pres_fac = config.pres_fac_init
    used = np.zeros(n_seg, dtype=np.int64)
    routes: dict[str, NetRoute] = {}
    overuse_history: list[int] = []
    iterations = 0

    for _ in range(config.max_iters):
        iterations += 1
        used[:] = 0
        routes = {}
        for ni in order:
            net = netlist.nets[ni]
            dp, sinks = terminals[ni]
            if not sinks:
                routes[net.id] = NetRoute(net.id, (), (), ())
                continue
            seg_cost = 1.0 + pres_fac * np.maximum(0.0, used + 1.0 - seg_cap) + hist
            tree_nodes: set[int] = {dp}
            tree_edges: list[tuple[int, int]] = []
            remaining = set(sinks)
            while remaining:
                reached = _expand(g, tree_nodes, remaining, seg_cost, n_seg, is_pin)
                path = reached[1]
                for a, b in path:
                    tree_edges.append((a, b))
                    tree_nodes.add(b)
                remaining.discard(reached[0])
            segs = tuple(sorted(n for n in tree_nodes if n < n_seg))
            for s in segs:
                used[s] += 1
            routes[net.id] = NetRoute(net.id, tuple(sorted(tree_nodes)), tuple(tree_edges), segs)

        over = used - int(seg_cap)
        n_over = int((over > 0).sum())
        overuse_history.append(n_over)
        if n_over == 0:
            break
        hist += config.hist_fac * np.maximum(0, over)
        pres_fac *= config.pres_fac_mult

    overflow = overuse_history[-1] > 0
    return RoutingResult(routes, used, int(seg_cap), overflow, iterations, overuse_history, g)


def _expand(
    g: RoutingGraph,
    tree_nodes: set[int],
    targets: set[int],
    seg_cost: np.ndarray,
    n_seg: int,
    is_pin: np.ndarray,
) -> tuple[int, list[tuple[int, int]]]:
    """Dijkstra from the whole tree to the nearest target pin.

    Returns (target, path edges parent->child from tree to target).
    """
    dist = np.full(g.n_nodes, np.inf)
    prev = np.full(g.n_nodes, -1, dtype=np.int64)
    heap: list[tuple[float, int]] = []
    for n in tree_nodes:
        dist[n] = 0.0
        heapq.heappush(heap, (0.0, n))
    while heap:
        d, n = heapq.heappop(heap)
        if d > dist[n]:
            continue
        if n in targets:
            path = []
            cur = n
            while prev[cur] >= 0:
                path.append((int(prev[cur]), cur))
                cur = int(prev[cur])
            path.reverse()
            return n, path
        for m in g.neighbors(n):
            m = int(m)
            if is_pin[m] and m not in targets:
                continue
            nd = d + (seg_cost[m] if m < n_seg else 0.0)
            if nd < dist[m]:
                dist[m] = nd
                prev[m] = n
                heapq.heappush(heap, (nd, m))
    raise ValidationError("routing graph is disconnected; no path to remaining sinks")


CONGESTION_MODES = ("mean", "max", "p95")


def congestion_score(
    util: ChannelUtilization,
    mode: str = "mean",
    region: tuple[int, int, int, int] | None = None,
) -> float:
    """Aggregate utilization, optionally over an interior-tile rectangle.

    region is (c0, r0, c1, r1) half-open in interior tile coordinates; a
    segment counts when it borders or crosses the rectangle.
    """
    if mode not in CONGESTION_MODES:
        raise ValidationError(f"mode must be mean|max|p95, got {mode!r}")
    if region is None:
        vals = util.values()
    else:
        c0, r0, c1, r1 = region
        if not (0 <= c0 < c1 <= util.cols and 0 <= r0 < r1 <= util.rows):
            raise ValidationError(f"region {region} outside {util.cols}x{util.rows} interior")
        picks = []
        for hy in range(util.rows + 1):
            for sx in range(util.cols):
                if c0 <= sx < c1 and r0 <= hy <= r1:
                    picks.append(util.h[hy, sx])
        for sy in range(util.rows):
            for vx in range(util.cols + 1):
                if r0 <= sy < r1 and c0 <= vx <= c1:
                    picks.append(util.v[sy, vx])
        vals = np.array(picks)
    if vals.size == 0:
        raise ValidationError("no segments selected")
    if mode == "mean":
        return float(vals.mean())
    if mode == "max":
        return float(vals.max())
    return float(np.percentile(vals, 95.0))
