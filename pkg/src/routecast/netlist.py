"""Netlist model, text serialization, and a synthetic benchmark generator.

File format (one statement per line, '#' starts a comment):

    block <id> <KIND>
    net <id> <driver_block> <sink_block> [<sink_block> ...]

Blocks must be declared before any net references them. A netlist object
stores blocks and nets sorted by id, so serialize() is canonical and
parse(serialize(n)) round-trips exactly.

The synthetic generator grows Rent-style localized connectivity: blocks are
shuffled once into a binary partition tree, and each sink escapes upward
from its driver's leaf with probability 2**(rent_exponent - 1) per level
before picking uniformly inside the reached subtree. Out-degrees: every
input pad drives exactly one net, memory and multiplier blocks drive two,
and CLB out-degree is 1 + Poisson(2.6) so the net count lands near the
3.6-nets-per-CLB neighbourhood seen in small benchmark suites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arch import BLOCK_KINDS, CLB, INPAD, MEM, MULT, OUTPAD
from .errors import ArtifactIOError, ValidationError

# CLB out-degree is 1 + Poisson(_CLB_EXTRA_DRIVES_MEAN)
_CLB_EXTRA_DRIVES_MEAN = 2.6
_BLOCK_DRIVE_COUNT = {INPAD: 1, MEM: 2, MULT: 2}


@dataclass(frozen=True)
class Net:
    id: str
    driver: str
    sinks: tuple[str, ...]


@dataclass
class Netlist:
    """Blocks and nets, canonically ordered by id."""

    blocks: dict[str, str] = field(default_factory=dict)  # id -> kind
    nets: list[Net] = field(default_factory=list)

    def __post_init__(self):
        self.blocks = dict(sorted(self.blocks.items()))
        self.nets = sorted(self.nets, key=lambda n: n.id)
        self.validate()

    def validate(self) -> None:
        if not self.blocks:
            raise ValidationError("netlist has no blocks")
        for bid, kind in self.blocks.items():
            if kind not in BLOCK_KINDS:
                raise ValidationError(f"block {bid!r} has unknown kind {kind!r}")
        seen = set()
        for net in self.nets:
            if net.id in seen:
                raise ValidationError(f"duplicate net id {net.id!r}")
            seen.add(net.id)
            if net.driver not in self.blocks:
                raise ValidationError(f"net {net.id!r} driver {net.driver!r} is not a declared block")
            if not net.sinks:
                raise ValidationError(f"net {net.id!r} has no sinks")
            for s in net.sinks:
                if s not in self.blocks:
                    raise ValidationError(f"net {net.id!r} sink {s!r} is not a declared block")
                if s == net.driver:
                    raise ValidationError(f"net {net.id!r} lists its driver {s!r} as a sink")
            if len(set(net.sinks)) != len(net.sinks):
                raise ValidationError(f"net {net.id!r} has duplicate sinks")

    def counts(self) -> dict[str, int]:
        out = {k: 0 for k in BLOCK_KINDS}
        for kind in self.blocks.values():
            out[kind] += 1
        return out

    @property
    def n_nets(self) -> int:
        return len(self.nets)

    def nets_of_block(self) -> dict[str, list[int]]:
        """block id -> indices into self.nets the block touches."""
        out: dict[str, list[int]] = {b: [] for b in self.blocks}
        for i, net in enumerate(self.nets):
            touched = {net.driver, *net.sinks}
            for b in touched:
                out[b].append(i)
        return out

    def serialize(self) -> str:
        lines = []
        for bid, kind in self.blocks.items():
            lines.append(f"block {bid} {kind}")
        for net in self.nets:
            lines.append(f"net {net.id} {net.driver} " + " ".join(net.sinks))
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.serialize())


def parse_netlist(text: str) -> Netlist:
    """Parse the text format; errors carry 1-based line numbers."""
    blocks: dict[str, str] = {}
    nets: list[Net] = []
    net_ids: set[str] = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        stmt = toks[0]
        if stmt == "block":
            if len(toks) != 3:
                raise ValidationError(f"line {ln}: block statement needs 'block <id> <KIND>'")
            _, bid, kind = toks
            if kind not in BLOCK_KINDS:
                raise ValidationError(f"line {ln}: unknown block kind {kind!r}")
            if bid in blocks:
                raise ValidationError(f"line {ln}: duplicate block id {bid!r}")
            blocks[bid] = kind
        elif stmt == "net":
            if len(toks) < 4:
                raise ValidationError(f"line {ln}: net statement needs 'net <id> <driver> <sink>...'")
            nid, driver, sinks = toks[1], toks[2], toks[3:]
            if nid in net_ids:
                raise ValidationError(f"line {ln}: duplicate net id {nid!r}")
            net_ids.add(nid)
            if driver not in blocks:
                raise ValidationError(f"line {ln}: net {nid!r} driver {driver!r} not declared")
            for s in sinks:
                if s not in blocks:
                    raise ValidationError(f"line {ln}: net {nid!r} sink {s!r} not declared")
            nets.append(Net(nid, driver, tuple(sinks)))
        else:
            raise ValidationError(f"line {ln}: unknown statement {stmt!r}")
    if not blocks:
        raise ValidationError("netlist text declares no blocks")
    return Netlist(blocks, nets)


def load_netlist(path: str | Path) -> Netlist:
    p = Path(path)
    if not p.exists():
        raise ArtifactIOError(f"netlist file not found: {p}")
    try:
        return parse_netlist(p.read_text())
    except ValidationError as e:
        raise ValidationError(f"{p}: {e}") from e


@dataclass(frozen=True)
class SyntheticParams:
    """Knobs for the synthetic benchmark generator."""

    n_clb: int
    n_inpad: int
    n_outpad: int
    n_mem: int = 0
    n_mult: int = 0
    avg_fanout: float = 3.0
    rent_exponent: float = 0.7

    def __post_init__(self):
        if self.n_clb < 1:
            raise ValidationError(f"n_clb must be >= 1, got {self.n_clb}")
        for name in ("n_inpad", "n_outpad", "n_mem", "n_mult"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.avg_fanout < 1.0:
            raise ValidationError(f"avg_fanout must be >= 1, got {self.avg_fanout}")
        if not (0.0 < self.rent_exponent <= 1.0):
            raise ValidationError(f"rent_exponent must be in (0, 1], got {self.rent_exponent}")


def _partition_ancestors(n: int, pos: int) -> list[tuple[int, int]]:
    """Nested [lo, hi) ranges from the leaf holding `pos` up to the root."""
    chain = []
    lo, hi = 0, n
    while hi - lo > 1:
        chain.append((lo, hi))
        mid = (lo + hi) // 2
        if pos < mid:
            hi = mid
        else:
            lo = mid
    chain.append((lo, hi))
    chain.reverse()  # leaf first
    return chain


def generate_synthetic(params: SyntheticParams, seed: int) -> Netlist:
    """Deterministic synthetic netlist for the given params and seed."""
    rng = np.random.default_rng(seed)

    block_ids: list[str] = []
    kinds: dict[str, str] = {}

    def add(prefix: str, count: int, kind: str):
        for i in range(count):
            bid = f"{prefix}{i:05d}"
            block_ids.append(bid)
            kinds[bid] = kind

    add("clb", params.n_clb, CLB)
    add("mem", params.n_mem, MEM)
    add("mult", params.n_mult, MULT)
    add("in", params.n_inpad, INPAD)
    add("out", params.n_outpad, OUTPAD)

    order = [block_ids[i] for i in rng.permutation(len(block_ids))]
    pos = {b: i for i, b in enumerate(order)}
    n = len(order)
    # input pads never appear as sinks; everything else may
    sinkable = np.array([kinds[b] != INPAD for b in order], dtype=bool)
    escape_p = 2.0 ** (params.rent_exponent - 1.0)
    fed_pads: set[str] = set()  # an output pad is driven at most once

    def pick_sink(driver: str, taken: set[str]) -> str | None:
        chain = _partition_ancestors(n, pos[driver])
        level = 0
        while level < len(chain) - 1 and rng.random() < escape_p:
            level += 1
        lo, hi = chain[level]
        # widen until the window holds a usable candidate
        while True:
            cands = [
                order[i]
                for i in range(lo, hi)
                if sinkable[i] and order[i] != driver and order[i] not in taken and order[i] not in fed_pads
            ]
            if cands:
                return cands[int(rng.integers(len(cands)))]
            level += 1
            if level >= len(chain):
                return None
            lo, hi = chain[level]

    nets: list[Net] = []
    seq = 0
    for bid in block_ids:  # declaration order keeps rng use deterministic
        kind = kinds[bid]
        if kind == OUTPAD:
            continue
        drives = _BLOCK_DRIVE_COUNT.get(kind)
        if drives is None:
            drives = 1 + int(rng.poisson(_CLB_EXTRA_DRIVES_MEAN))
        for _ in range(drives):
            fanout = int(rng.geometric(1.0 / params.avg_fanout))
            sinks: list[str] = []
            taken: set[str] = set()
            for _ in range(fanout):
                s = pick_sink(bid, taken)
                if s is None:
                    break
                sinks.append(s)
                taken.add(s)
                if kinds[s] == OUTPAD:
                    fed_pads.add(s)
            if sinks:
                nets.append(Net(f"n{seq:06d}", bid, tuple(sinks)))
                seq += 1

    # every output pad must be fed by something
    drivers = [b for b in block_ids if kinds[b] != OUTPAD]
    for bid in block_ids:
        if kinds[bid] == OUTPAD and bid not in fed_pads:
            d = drivers[int(rng.integers(len(drivers)))]
            nets.append(Net(f"n{seq:06d}", d, (bid,)))
            seq += 1

    return Netlist(kinds, nets)
