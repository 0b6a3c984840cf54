import numpy as np
import pytest

from routecast.arch import make_floorplan
from routecast.errors import ArtifactIOError, ValidationError
from routecast.netlist import SyntheticParams, generate_synthetic, parse_netlist
from routecast.placer import AnnealSchedule, Placement, anneal, random_placement
from routecast.router import (
    ChannelUtilization,
    RouteConfig,
    congestion_score,
    route,
)


def _two_block_case(channel_capacity):
    fp = make_floorplan(cols=2, rows=1, mem_col=None, mult_col=None,
                        channel_capacity=channel_capacity)
    net = parse_netlist("block a CLB\nblock b CLB\nnet n0 a b\nnet n1 a b\n")
    pl = Placement({"a": (1, 1, 0), "b": (2, 1, 0)})
    return fp, net, pl


def test_single_net_single_segment_utilization():
    fp = make_floorplan(cols=2, rows=1, mem_col=None, mult_col=None)
    net = parse_netlist("block a CLB\nblock b CLB\nnet n0 a b\n")
    pl = Placement({"a": (1, 1, 0), "b": (2, 1, 0)})
    rr = route(net, pl, fp)
    assert not rr.overflow
    u = rr.utilization()
    # exactly one segment carries the net at 1/16
    vals = u.values()
    assert np.count_nonzero(vals) >= 1
    assert set(np.round(vals[vals > 0], 6)) == {round(1 / 16, 6)}


def test_capacity_one_forces_detour():
    fp, net, pl = _two_block_case(channel_capacity=1)
    rr = route(net, pl, fp)
    assert not rr.overflow
    assert rr.iterations >= 2  # first pass collides, negotiation resolves it
    u = rr.utilization()
    assert u.values().max() <= 1.0
    # the two nets use disjoint segment sets
    s0 = set(rr.routes["n0"].segments)
    s1 = set(rr.routes["n1"].segments)
    assert s0 and s1 and not (s0 & s1)


def test_capacity_two_shares_segment():
    fp, net, pl = _two_block_case(channel_capacity=2)
    rr = route(net, pl, fp)
    assert not rr.overflow
    assert rr.iterations == 1
    assert rr.used.max() == 2


def test_route_deterministic(fp8, net40):
    pl = anneal(net40, fp8, AnnealSchedule(seed=0, inner_num=1.0)).placement
    a = route(net40, pl, fp8)
    b = route(net40, pl, fp8)
    assert a.routes == b.routes
    assert np.array_equal(a.used, b.used)
    assert a.overuse_history == b.overuse_history


def test_route_tree_connects_all_terminals(fp8, net40):
    pl = random_placement(net40, fp8, seed=4)
    rr = route(net40, pl, fp8)
    g = rr.graph
    for net in net40.nets:
        nr = rr.routes[net.id]
        want_pins = {g.pin_node(*pl.tile_of(b)) for b in (net.driver, *net.sinks)}
        if len(want_pins) == 1:
            continue  # all terminals on one tile, nothing to route
        got = set(nr.nodes)
        assert want_pins <= got
        # edges form a connected tree over got
        reach = {nr.nodes[0]}
        edges = list(nr.edges)
        grew = True
        while grew:
            grew = False
            for a, b in edges:
                if (a in reach) != (b in reach):
                    reach.update((a, b))
                    grew = True
        assert reach == got


def test_route_respects_used_accounting(fp8, net40):
    pl = random_placement(net40, fp8, seed=4)
    rr = route(net40, pl, fp8)
    counts = np.zeros_like(rr.used)
    for nr in rr.routes.values():
        for s in nr.segments:
            counts[s] += 1
    assert np.array_equal(counts, rr.used)


def test_overflow_flag_when_capacity_impossible():
    # 8 two-terminal nets across one unit channel of capacity 1 cannot fit
    fp = make_floorplan(cols=1, rows=1, mem_col=None, mult_col=None, channel_capacity=1)
    lines = ["block a CLB"]
    for i in range(8):
        lines.append(f"block p{i} OUTPAD")
    for i in range(8):
        lines.append(f"net n{i} a p{i}")
    net = parse_netlist("\n".join(lines) + "\n")
    pl_map = {"a": (1, 1, 0)}
    for i in range(8):
        pl_map[f"p{i}"] = (1, 0, i) if i < 4 else (1, 2, i - 4)
    rr = route(net, Placement(pl_map), fp, RouteConfig(max_iters=8))
    assert rr.overflow
    assert rr.iterations == 8
    assert rr.overuse_history[-1] > 0


def test_route_config_validation():
    with pytest.raises(ValidationError):
        RouteConfig(max_iters=0)
    with pytest.raises(ValidationError):
        RouteConfig(pres_fac_init=0)
    with pytest.raises(ValidationError):
        RouteConfig(pres_fac_mult=0.5)


def test_utilization_shapes(fp_small, rng):
    net = generate_synthetic(SyntheticParams(n_clb=6, n_inpad=2, n_outpad=2), seed=1)
    pl = random_placement(net, fp_small, seed=1)
    u = route(net, pl, fp_small).utilization()
    assert u.h.shape == (5, 4)
    assert u.v.shape == (4, 5)
    assert u.values().shape == (40,)


def test_utilization_csv_roundtrip():
    h = np.linspace(0, 1, 15).reshape(5, 3)
    v = np.linspace(1, 0, 16).reshape(4, 4)
    u = ChannelUtilization(h, v)
    back = ChannelUtilization.from_csv(u.to_csv())
    assert np.allclose(back.h, u.h, atol=1e-6)
    assert np.allclose(back.v, u.v, atol=1e-6)


def test_utilization_csv_errors(tmp_path):
    with pytest.raises(ValidationError, match="header"):
        ChannelUtilization.from_csv("x,y,u\n")
    with pytest.raises(ValidationError, match="4 csv fields"):
        ChannelUtilization.from_csv("kind,x,y,u\nh,1,2\n")
    with pytest.raises(ValidationError, match="missing"):
        ChannelUtilization.from_csv("kind,x,y,u\nh,0,0,0.5\nh,0,1,0.5\nv,0,0,0.1\n")
    with pytest.raises(ArtifactIOError):
        ChannelUtilization.load_csv(tmp_path / "none.csv")


def test_utilization_validation():
    with pytest.raises(ValidationError):
        ChannelUtilization(np.zeros((3, 3)), np.zeros((3, 3)))
    with pytest.raises(ValidationError):
        ChannelUtilization(-np.ones((2, 1)), np.zeros((1, 2)))


def test_congestion_score_modes():
    h = np.array([[0.0, 0.2], [0.4, 0.6], [0.8, 1.0]])  # rows+1=3, cols=2
    v = np.array([[0.1, 0.3, 0.5], [0.5, 0.7, 0.9]])  # rows=2, cols+1=3
    u = ChannelUtilization(h, v)
    vals = u.values()
    assert congestion_score(u, "mean") == pytest.approx(float(vals.mean()))
    assert congestion_score(u, "max") == pytest.approx(1.0)
    assert congestion_score(u, "p95") == pytest.approx(float(np.percentile(vals, 95)))
    with pytest.raises(ValidationError):
        congestion_score(u, "median")


def test_congestion_score_region():
    h = np.zeros((3, 2))
    v = np.zeros((2, 3))
    h[0, 0] = 0.5  # top channel above tile (0, 0)
    u = ChannelUtilization(h, v)
    # tile (0,0) borders 4 segments: h (0,0),(0,1) and v (0,0),(1,0)
    score = congestion_score(u, "mean", region=(0, 0, 1, 1))
    assert score == pytest.approx(0.5 / 4)
    with pytest.raises(ValidationError):
        congestion_score(u, "mean", region=(0, 0, 3, 1))
