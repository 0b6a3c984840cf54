"""Island-style FPGA floorplan model and routing-channel graph.

The device is a cols x rows grid of logic tiles wrapped in a single ring of
IO pads. Corner positions of the ring are unusable filler. One interior
column may be memory tiles and one may be multiplier tiles; all remaining
interior columns are CLBs.

Coordinates
-----------
Full-grid coordinates (x, y) cover the ring too: x in [0, cols+2), y in
[0, rows+2), with y = 0 the top row (image convention). Interior tile
(c, r) sits at full-grid (c+1, r+1).

Routing fabric: one horizontal channel between (and around) every tile row,
one vertical channel likewise per column. A channel is modelled as unit
segments, one per tile span, each with capacity `channel_capacity`. At
channel crossings every incident segment connects to every other (full
crossbar). Every non-corner tile owns a single pin node joined to its
adjacent channel segments: interior tiles see all four, pads only the one
channel inside the ring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ArtifactIOError, ValidationError

# tile kinds
CLB = "CLB"
MEM = "MEM"
MULT = "MULT"
IO = "IO"
CORNER = "CORNER"

# block kinds (netlist side); placeable onto tile kinds per PLACEABLE_ON
INPAD = "INPAD"
OUTPAD = "OUTPAD"

BLOCK_KINDS = (CLB, MEM, MULT, INPAD, OUTPAD)

# block kind -> tile kind it occupies
PLACEABLE_ON = {CLB: CLB, MEM: MEM, MULT: MULT, INPAD: IO, OUTPAD: IO}

_PIN_CAPACITY = 10**9  # pins are never a routing bottleneck


@dataclass(frozen=True)
class Floorplan:
    """Device geometry. Immutable; derived structure is recomputed on demand."""

    cols: int
    rows: int
    mem_col: int | None = None
    mult_col: int | None = None
    channel_capacity: int = 16
    io_ports_per_pad: int = 8

    def __post_init__(self):
        if self.cols < 1 or self.rows < 1:
            raise ValidationError(f"grid must be at least 1x1, got {self.cols}x{self.rows}")
        if self.channel_capacity < 1:
            raise ValidationError(f"channel_capacity must be >= 1, got {self.channel_capacity}")
        if self.io_ports_per_pad < 1:
            raise ValidationError(f"io_ports_per_pad must be >= 1, got {self.io_ports_per_pad}")
        for name in ("mem_col", "mult_col"):
            v = getattr(self, name)
            if v is not None and not (0 <= v < self.cols):
                raise ValidationError(f"{name}={v} outside interior columns [0, {self.cols})")
        if self.mem_col is not None and self.mem_col == self.mult_col:
            raise ValidationError(f"mem_col and mult_col collide at {self.mem_col}")

    # -- grid queries ------------------------------------------------------

    @property
    def full_cols(self) -> int:
        return self.cols + 2

    @property
    def full_rows(self) -> int:
        return self.rows + 2

    def tile_kind(self, x: int, y: int) -> str:
        """Kind of the tile at full-grid (x, y)."""
        if not (0 <= x < self.full_cols and 0 <= y < self.full_rows):
            raise ValidationError(f"tile ({x}, {y}) outside {self.full_cols}x{self.full_rows} grid")
        on_x_edge = x == 0 or x == self.full_cols - 1
        on_y_edge = y == 0 or y == self.full_rows - 1
        if on_x_edge and on_y_edge:
            return CORNER
        if on_x_edge or on_y_edge:
            return IO
        c = x - 1
        if c == self.mem_col:
            return MEM
        if c == self.mult_col:
            return MULT
        return CLB

    def tile_capacity(self, x: int, y: int) -> int:
        """How many blocks the tile can hold."""
        kind = self.tile_kind(x, y)
        if kind == CORNER:
            return 0
        if kind == IO:
            return self.io_ports_per_pad
        return 1

    def sites(self, tile_kind: str) -> list[tuple[int, int]]:
        """All full-grid positions of the given tile kind, row-major order."""
        out = []
        for y in range(self.full_rows):
            for x in range(self.full_cols):
                if self.tile_kind(x, y) == tile_kind:
                    out.append((x, y))
        return out

    def io_ring_size(self) -> int:
        """Ring positions including the 4 unusable corners."""
        return 2 * self.cols + 2 * self.rows + 4

    def capacity_for_block_kind(self, block_kind: str) -> int:
        """Total placement capacity available to one block kind."""
        if block_kind not in PLACEABLE_ON:
            raise ValidationError(f"unknown block kind {block_kind!r}")
        tk = PLACEABLE_ON[block_kind]
        per = self.io_ports_per_pad if tk == IO else 1
        return per * len(self.sites(tk))

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "cols": self.cols,
            "rows": self.rows,
            "mem_col": self.mem_col,
            "mult_col": self.mult_col,
            "channel_capacity": self.channel_capacity,
            "io_ports_per_pad": self.io_ports_per_pad,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Floorplan":
        required = {"cols", "rows", "mem_col", "mult_col", "channel_capacity", "io_ports_per_pad"}
        missing = required - set(d)
        if missing:
            raise ValidationError(f"floorplan dict missing fields: {sorted(missing)}")
        return cls(**{k: d[k] for k in required})

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(canonical_json(self.to_dict()) + "\n")

    @classmethod
    def load_json(cls, path: str | Path) -> "Floorplan":
        p = Path(path)
        if not p.exists():
            raise ArtifactIOError(f"floorplan file not found: {p}")
        try:
            d = json.loads(p.read_text())
        except json.JSONDecodeError as e:
            raise ArtifactIOError(f"floorplan file {p} is not valid JSON: {e}") from e
        if not isinstance(d, dict):
            raise ArtifactIOError(f"floorplan file {p} must hold a JSON object")
        return cls.from_dict(d)


def canonical_json(obj) -> str:
    """Stable JSON encoding used for every artifact we hash or diff."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# node kind codes in RoutingGraph arrays
NODE_HSEG = 0
NODE_VSEG = 1
NODE_PIN = 2


class RoutingGraph:
    """Channel-segment graph for a floorplan.

    Node ids are dense ints laid out as: horizontal segments (row-major by
    channel row), then vertical segments (row-major by segment row), then
    tile pins (row-major over the full grid, corners skipped). Horizontal
    segment (sx, hy) spans interior column sx inside horizontal channel hy;
    vertical segment (vx, sy) spans interior row sy inside vertical channel
    vx. There are rows+1 horizontal and cols+1 vertical channels.
    """

    def __init__(self, fp: Floorplan):
        self.fp = fp
        cols, rows = fp.cols, fp.rows
        self.n_h = (rows + 1) * cols
        self.n_v = (cols + 1) * rows
        self._pin_of: dict[tuple[int, int], int] = {}
        nid = self.n_h + self.n_v
        for y in range(fp.full_rows):
            for x in range(fp.full_cols):
                if fp.tile_kind(x, y) != CORNER:
                    self._pin_of[(x, y)] = nid
                    nid += 1
        self.n_nodes = nid

        self.capacity = np.full(self.n_nodes, _PIN_CAPACITY, dtype=np.int64)
        self.capacity[: self.n_h + self.n_v] = fp.channel_capacity

        self.node_kind = np.full(self.n_nodes, NODE_PIN, dtype=np.int8)
        self.node_kind[: self.n_h] = NODE_HSEG
        self.node_kind[self.n_h : self.n_h + self.n_v] = NODE_VSEG

        adj: list[list[int]] = [[] for _ in range(self.n_nodes)]

        def link(a: int, b: int):
            adj[a].append(b)
            adj[b].append(a)

        # pins of interior tiles reach all four surrounding segments
        for r in range(rows):
            for c in range(cols):
                p = self._pin_of[(c + 1, r + 1)]
                link(p, self.h_node(c, r))
                link(p, self.h_node(c, r + 1))
                link(p, self.v_node(c, r))
                link(p, self.v_node(c + 1, r))
        # pad pins reach the single channel segment inside the ring
        for c in range(cols):
            link(self._pin_of[(c + 1, 0)], self.h_node(c, 0))
            link(self._pin_of[(c + 1, rows + 1)], self.h_node(c, rows))
        for r in range(rows):
            link(self._pin_of[(0, r + 1)], self.v_node(0, r))
            link(self._pin_of[(cols + 1, r + 1)], self.v_node(cols, r))
        # full crossbar at every channel crossing
        for hy in range(rows + 1):
            for vx in range(cols + 1):
                inc = []
                if vx > 0:
                    inc.append(self.h_node(vx - 1, hy))
                if vx < cols:
                    inc.append(self.h_node(vx, hy))
                if hy > 0:
                    inc.append(self.v_node(vx, hy - 1))
                if hy < rows:
                    inc.append(self.v_node(vx, hy))
                for i in range(len(inc)):
                    for j in range(i + 1, len(inc)):
                        link(inc[i], inc[j])

        self.adj = [np.array(sorted(ns), dtype=np.int64) for ns in adj]
        self.n_edges = sum(len(a) for a in self.adj) // 2

    # -- id mapping --------------------------------------------------------

    def h_node(self, sx: int, hy: int) -> int:
        if not (0 <= sx < self.fp.cols and 0 <= hy <= self.fp.rows):
            raise ValidationError(f"horizontal segment ({sx}, {hy}) out of range")
        return hy * self.fp.cols + sx

    def v_node(self, vx: int, sy: int) -> int:
        if not (0 <= vx <= self.fp.cols and 0 <= sy < self.fp.rows):
            raise ValidationError(f"vertical segment ({vx}, {sy}) out of range")
        return self.n_h + sy * (self.fp.cols + 1) + vx

    def pin_node(self, x: int, y: int) -> int:
        try:
            return self._pin_of[(x, y)]
        except KeyError:
            raise ValidationError(f"tile ({x}, {y}) has no pin (corner or out of range)") from None

    def seg_coords(self, node: int) -> tuple[str, int, int]:
        """('h', sx, hy) or ('v', vx, sy) for a segment node."""
        if node < 0 or node >= self.n_h + self.n_v:
            raise ValidationError(f"node {node} is not a channel segment")
        if node < self.n_h:
            return ("h", node % self.fp.cols, node // self.fp.cols)
        k = node - self.n_h
        return ("v", k % (self.fp.cols + 1), k // (self.fp.cols + 1))

    def describe(self, node: int) -> str:
        if node >= self.n_h + self.n_v:
            for (x, y), p in self._pin_of.items():
                if p == node:
                    return f"pin({x},{y})"
            return f"node({node})"
        kind, a, b = self.seg_coords(node)
        return f"{kind}({a},{b})"

    def neighbors(self, node: int) -> np.ndarray:
        return self.adj[node]

    @property
    def n_segments(self) -> int:
        return self.n_h + self.n_v


def make_floorplan(
    cols: int = 8,
    rows: int = 8,
    mem_col: int | None = 2,
    mult_col: int | None = 5,
    channel_capacity: int = 16,
    io_ports_per_pad: int = 8,
) -> Floorplan:
    """Standard device builder; defaults give the 8x8 desk-scale part."""
    return Floorplan(cols, rows, mem_col, mult_col, channel_capacity, io_ports_per_pad)


def routing_graph(fp: Floorplan) -> RoutingGraph:
    return RoutingGraph(fp)
