"""Simulated-annealing placement over a floorplan.

Cost is summed half-perimeter wire length (HPWL) of every net's bounding
box in tile coordinates. The anneal is the classic adaptive scheme: start
temperature from the cost spread of warm-up moves, a fixed per-schedule
cooling factor, moves-per-temperature scaling with block count ** 4/3, and
a range limit window steered toward a 0.44 acceptance rate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arch import IO, PLACEABLE_ON, Floorplan
from .errors import ArtifactIOError, ValidationError
from .netlist import Netlist

_WARMUP_MOVES = 50
_TARGET_SUCCESS = 0.44
_MAX_TEMPS = 5000  # safety stop, never reached by sane schedules

ALGORITHMS = ("anneal", "random")


@dataclass
class Placement:
    """block id -> (x, y, subtile) in full-grid coordinates."""

    assignment: dict[str, tuple[int, int, int]] = field(default_factory=dict)

    def copy(self) -> "Placement":
        return Placement(dict(self.assignment))

    def tile_of(self, block_id: str) -> tuple[int, int]:
        x, y, _ = self.assignment[block_id]
        return (x, y)

    def to_dict(self) -> dict:
        return {"assignment": {b: list(p) for b, p in sorted(self.assignment.items())}}

    @classmethod
    def from_dict(cls, d: dict) -> "Placement":
        if "assignment" not in d or not isinstance(d["assignment"], dict):
            raise ValidationError("placement dict needs an 'assignment' object")
        out = {}
        for b, p in d["assignment"].items():
            if not (isinstance(p, (list, tuple)) and len(p) == 3):
                raise ValidationError(f"placement entry for {b!r} must be [x, y, subtile]")
            out[b] = (int(p[0]), int(p[1]), int(p[2]))
        return cls(out)

    def save_json(self, path: str | Path) -> None:
        from .arch import canonical_json

        Path(path).write_text(canonical_json(self.to_dict()) + "\n")

    @classmethod
    def load_json(cls, path: str | Path) -> "Placement":
        p = Path(path)
        if not p.exists():
            raise ArtifactIOError(f"placement file not found: {p}")
        try:
            return cls.from_dict(json.loads(p.read_text()))
        except json.JSONDecodeError as e:
            raise ArtifactIOError(f"placement file {p} is not valid JSON: {e}") from e


def validate_placement(placement: Placement, netlist: Netlist, fp: Floorplan) -> None:
    """Raise unless every block sits on a legal, uncrowded site."""
    missing = set(netlist.blocks) - set(placement.assignment)
    if missing:
        raise ValidationError(f"placement missing blocks: {sorted(missing)[:5]}")
    extra = set(placement.assignment) - set(netlist.blocks)
    if extra:
        raise ValidationError(f"placement has unknown blocks: {sorted(extra)[:5]}")
    used: dict[tuple[int, int, int], str] = {}
    for bid, (x, y, sub) in placement.assignment.items():
        want = PLACEABLE_ON[netlist.blocks[bid]]
        got = fp.tile_kind(x, y)
        if got != want:
            raise ValidationError(f"block {bid!r} ({netlist.blocks[bid]}) placed on {got} tile ({x},{y})")
        cap = fp.tile_capacity(x, y)
        if not (0 <= sub < cap):
            raise ValidationError(f"block {bid!r} subtile {sub} outside [0, {cap}) at ({x},{y})")
        key = (x, y, sub)
        if key in used:
            raise ValidationError(f"blocks {used[key]!r} and {bid!r} share site {key}")
        used[key] = bid


def random_placement(netlist: Netlist, fp: Floorplan, seed: int | np.random.Generator = 0) -> Placement:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    by_tile_kind: dict[str, list[str]] = {}
    for bid, kind in netlist.blocks.items():  # blocks already sorted by id
        by_tile_kind.setdefault(PLACEABLE_ON[kind], []).append(bid)
    assignment: dict[str, tuple[int, int, int]] = {}
    for tile_kind in sorted(by_tile_kind):
        blocks = by_tile_kind[tile_kind]
        sites = fp.sites(tile_kind)
        per = fp.io_ports_per_pad if tile_kind == IO else 1
        slots = [(x, y, s) for (x, y) in sites for s in range(per)]
        if len(blocks) > len(slots):
            raise ValidationError(
                f"not enough {tile_kind} capacity: need {len(blocks)}, have {len(slots)}"
            )
        perm = rng.permutation(len(slots))
        for i, bid in enumerate(blocks):
            assignment[bid] = slots[perm[i]]
    return Placement(assignment)


def hpwl(netlist: Netlist, placement: Placement) -> float:
    total = 0.0
    for net in netlist.nets:
        xs = []
        ys = []
        for b in {net.driver, *net.sinks}:
            x, y, _ = placement.assignment[b]
            xs.append(x)
            ys.append(y)
        total += (max(xs) - min(xs)) + (max(ys) - min(ys))
    return float(total)


def metropolis_accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Standard acceptance rule; at T <= 0 only strict improvements pass."""
    if delta < 0:
        return True
    if temperature <= 0:
        return False
    return bool(rng.random() < math.exp(-delta / temperature))


@dataclass(frozen=True)
class AnnealSchedule:
    seed: int = 0
    alpha_t: float = 0.9
    inner_num: float = 10.0
    algorithm: str = "anneal"
    t_init_factor: float = 20.0
    exit_t: float = 0.005

    def __post_init__(self):
        if not (0.0 < self.alpha_t < 1.0):
            raise ValidationError(f"alpha_t must be in (0, 1), got {self.alpha_t}")
        if self.inner_num <= 0:
            raise ValidationError(f"inner_num must be > 0, got {self.inner_num}")
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.t_init_factor <= 0 or self.exit_t <= 0:
            raise ValidationError("t_init_factor and exit_t must be > 0")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "alpha_t": self.alpha_t,
            "inner_num": self.inner_num,
            "algorithm": self.algorithm,
        }


@dataclass
class AnnealResult:
    placement: Placement
    initial_cost: float
    final_cost: float
    accepted: int
    attempted: int
    temps_run: int
    snapshots: list[Placement]
    schedule: AnnealSchedule


class _Anneal:
    """Mutable placement state with incremental HPWL bookkeeping.

    Hot-path state lives in plain Python lists: per-move work touches a
    handful of small nets, where interpreter-level min/max beats numpy
    call overhead by a wide margin.
    """

    def __init__(self, netlist: Netlist, fp: Floorplan, init: Placement):
        self.fp = fp
        self.blocks = list(netlist.blocks)  # sorted ids
        self.index = {b: i for i, b in enumerate(self.blocks)}
        b = len(self.blocks)
        self.kind = [PLACEABLE_ON[netlist.blocks[bid]] for bid in self.blocks]
        self.x = [0] * b
        self.y = [0] * b
        self.sub = [0] * b
        for bid, (x, y, s) in init.assignment.items():
            i = self.index[bid]
            self.x[i], self.y[i], self.sub[i] = x, y, s

        self.net_terms: list[tuple[int, ...]] = []
        self.block_nets: list[list[int]] = [[] for _ in range(b)]
        for ni, net in enumerate(netlist.nets):
            terms = tuple(sorted({self.index[t] for t in (net.driver, *net.sinks)}))
            self.net_terms.append(terms)
            for t in terms:
                self.block_nets[t].append(ni)
        self.net_cost = [self._net_cost(i) for i in range(len(self.net_terms))]

        # occupancy: single-capacity tiles hold one index, pads hold sub -> index
        self.tile_occ: dict[tuple[int, int], int] = {}
        self.io_occ: dict[tuple[int, int], dict[int, int]] = {}
        for i in range(b):
            pos = (self.x[i], self.y[i])
            if self.kind[i] == IO:
                self.io_occ.setdefault(pos, {})[self.sub[i]] = i
            else:
                self.tile_occ[pos] = i

        self.kind_sites = {k: fp.sites(k) for k in sorted(set(self.kind))}

    def _net_cost(self, ni: int) -> float:
        xs = self.x
        ys = self.y
        terms = self.net_terms[ni]
        t0 = terms[0]
        xmin = xmax = xs[t0]
        ymin = ymax = ys[t0]
        for t in terms[1:]:
            xv = xs[t]
            yv = ys[t]
            if xv < xmin:
                xmin = xv
            elif xv > xmax:
                xmax = xv
            if yv < ymin:
                ymin = yv
            elif yv > ymax:
                ymax = yv
        return float((xmax - xmin) + (ymax - ymin))

    def total_cost(self) -> float:
        return float(sum(self.net_cost))

    def placement(self) -> Placement:
        return Placement(
            {bid: (self.x[i], self.y[i], self.sub[i]) for i, bid in enumerate(self.blocks)}
        )

    def try_move(self, rand: "_Rand", rlim: float, temperature: float, force: bool = False) -> bool:
        """Propose one move/swap; apply it if accepted. Returns acceptance."""
        b = rand.index(len(self.blocks))
        kind = self.kind[b]
        sites = self.kind_sites[kind]
        bx, by = self.x[b], self.y[b]
        target = None
        for _ in range(16):  # rejection-sample the rlim window
            tx, ty = sites[rand.index(len(sites))]
            if (tx != bx or ty != by) and abs(tx - bx) <= rlim and abs(ty - by) <= rlim:
                target = (tx, ty)
                break
        if target is None:
            cands = [
                (sx, sy)
                for sx, sy in sites
                if (sx != bx or sy != by) and abs(sx - bx) <= rlim and abs(sy - by) <= rlim
            ]
            if not cands:
                return False
            target = cands[rand.index(len(cands))]
        tx, ty = target

        if kind == IO:
            occ = self.io_occ.setdefault((tx, ty), {})
            cap = self.fp.io_ports_per_pad
            if len(occ) < cap:
                other = None
                tsub = min(s for s in range(cap) if s not in occ)
            else:
                vict = rand.index(cap)
                other = occ[vict]
                tsub = vict
        else:
            other = self.tile_occ.get((tx, ty))
            tsub = 0

        if other is None:
            nets = self.block_nets[b]
        else:
            nets = sorted(set(self.block_nets[b]) | set(self.block_nets[other]))
        net_cost = self.net_cost
        old = 0.0
        for ni in nets:
            old += net_cost[ni]

        self.x[b], self.y[b] = tx, ty
        if other is not None:
            self.x[other], self.y[other] = bx, by
        new = [self._net_cost(ni) for ni in nets]
        delta = sum(new) - old

        if force or delta <= 0 or (temperature > 0 and rand.uniform() < math.exp(-delta / temperature)):
            for ni, c in zip(nets, new):
                net_cost[ni] = c
            bsub = self.sub[b]
            self.sub[b] = tsub
            if kind == IO:
                tocc = self.io_occ[(tx, ty)]
                socc = self.io_occ[(bx, by)]
                del socc[bsub]
                if other is not None:
                    socc[bsub] = other
                    self.sub[other] = bsub
                tocc[tsub] = b
            else:
                del self.tile_occ[(bx, by)]
                if other is not None:
                    self.tile_occ[(bx, by)] = other
                self.tile_occ[(tx, ty)] = b
            return True

        self.x[b], self.y[b] = bx, by
        if other is not None:
            self.x[other], self.y[other] = tx, ty
        return False


class _Rand:
    """Buffered uniform draws: one Generator call per 8192 samples."""

    __slots__ = ("rng", "buf", "i")

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.buf = rng.random(8192)
        self.i = 0

    def uniform(self) -> float:
        if self.i >= len(self.buf):
            self.buf = self.rng.random(8192)
            self.i = 0
        v = self.buf[self.i]
        self.i += 1
        return float(v)

    def index(self, n: int) -> int:
        return int(self.uniform() * n)


def anneal(
    netlist: Netlist,
    fp: Floorplan,
    schedule: AnnealSchedule,
    snapshot_every: int = 0,
) -> AnnealResult:
    """Run one placement. Deterministic for a given (netlist, fp, schedule)."""
    if snapshot_every < 0:
        raise ValidationError(f"snapshot_every must be >= 0, got {snapshot_every}")
    ss = np.random.SeedSequence(schedule.seed)
    k_place, k_moves = ss.spawn(2)
    init = random_placement(netlist, fp, np.random.default_rng(k_place))
    initial_cost = hpwl(netlist, init)

    if schedule.algorithm == "random":
        # initial and final frames coincide; keep both for uniform consumers
        snaps = [init.copy(), init.copy()] if snapshot_every else []
        return AnnealResult(init, initial_cost, initial_cost, 0, 0, 0, snaps, schedule)

    st = _Anneal(netlist, fp, init)
    rand = _Rand(np.random.default_rng(k_moves))
    n_blocks = len(st.blocks)
    n_nets = len(netlist.nets)

    best_cost = initial_cost
    best = init.copy()
    accepted = attempted = 0
    snaps: list[Placement] = []
    last_snap_at = -1

    def snap(state_placement: Placement):
        nonlocal last_snap_at
        snaps.append(state_placement)
        last_snap_at = accepted

    if snapshot_every:
        snap(init.copy())

    def note_accept():
        nonlocal best_cost, best
        c = st.total_cost()
        if c < best_cost:
            best_cost = c
            best = st.placement()
        if snapshot_every and accepted % snapshot_every == 0:
            snap(st.placement())

    # warm-up: forced moves to probe the cost landscape
    warm_costs = []
    for _ in range(_WARMUP_MOVES):
        if st.try_move(rand, max(fp.cols, fp.rows), math.inf, force=True):
            accepted += 1
            attempted += 1
            note_accept()
        else:
            attempted += 1
        warm_costs.append(st.total_cost())
    t = schedule.t_init_factor * float(np.std(warm_costs))

    rlim = float(max(fp.cols, fp.rows))
    moves_per_t = max(1, round(schedule.inner_num * n_blocks ** (4.0 / 3.0)))
    temps = 0
    while temps < _MAX_TEMPS:
        cost = st.total_cost()
        if t <= 0 or n_nets == 0 or cost <= 0:
            break
        if t < schedule.exit_t * cost / n_nets:
            break
        acc_t = 0
        for _ in range(moves_per_t):
            attempted += 1
            if st.try_move(rand, rlim, t):
                accepted += 1
                acc_t += 1
                note_accept()
        success = acc_t / moves_per_t
        rlim = min(float(max(fp.cols, fp.rows)), max(1.0, rlim * (1.0 - _TARGET_SUCCESS + success)))
        t *= schedule.alpha_t
        temps += 1

    final = best if best_cost < st.total_cost() else st.placement()
    final_cost = min(best_cost, st.total_cost())
    if snapshot_every and last_snap_at != accepted:
        snap(final.copy())
    elif snapshot_every and snaps:
        snaps[-1] = final.copy()  # last snapshot must match the returned state
    return AnnealResult(final, initial_cost, final_cost, accepted, attempted, temps, snaps, schedule)


def sweep(
    netlist: Netlist,
    fp: Floorplan,
    seeds: list[int],
    alpha_ts: list[float],
    inner_nums: list[float],
    algorithms: list[str] = ("anneal",),
    snapshot_every: int = 0,
) -> list[tuple[dict, AnnealResult]]:
    """Cross-product of schedule axes, outermost to innermost as listed."""
    for name, axis in (("seeds", seeds), ("alpha_ts", alpha_ts), ("inner_nums", inner_nums), ("algorithms", algorithms)):
        if not list(axis):
            raise ValidationError(f"empty sweep axis: {name}")
    out = []
    for s in seeds:
        for a in alpha_ts:
            for inn in inner_nums:
                for alg in algorithms:
                    sched = AnnealSchedule(seed=s, alpha_t=a, inner_num=inn, algorithm=alg)
                    out.append((sched.to_dict(), anneal(netlist, fp, sched, snapshot_every)))
    return out
