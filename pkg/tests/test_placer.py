import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from oracles import hand_hpwl
from routecast.arch import make_floorplan
from routecast.errors import ArtifactIOError, ValidationError
from routecast.netlist import SyntheticParams, generate_synthetic, parse_netlist
from routecast.placer import (
    AnnealSchedule,
    Placement,
    anneal,
    hpwl,
    metropolis_accept,
    random_placement,
    validate_placement,
)


def test_hpwl_hand_fixture():
    text = (
        "block a CLB\nblock b CLB\nblock c CLB\nblock p INPAD\n"
        "net n0 p a\nnet n1 a b c\n"
    )
    n = parse_netlist(text)
    pl = Placement({"a": (1, 1, 0), "b": (4, 1, 0), "c": (2, 3, 0), "p": (0, 1, 0)})
    # n0 spans x 0..1, y 1..1 -> 1; n1 spans x 1..4, y 1..3 -> 5
    assert hpwl(n, pl) == 6.0


@settings(derandomize=True, max_examples=25, deadline=None)
@given(st.integers(0, 500))
def test_hpwl_matches_oracle(seed):
    net = generate_synthetic(SyntheticParams(n_clb=10, n_inpad=2, n_outpad=2), seed=seed)
    fp = make_floorplan(cols=4, rows=4, mem_col=None, mult_col=None)
    pl = random_placement(net, fp, seed=seed)
    nets = [[n.driver, *n.sinks] for n in net.nets]
    coords = {b: (x, y) for b, (x, y, _) in pl.assignment.items()}
    assert hpwl(net, pl) == pytest.approx(hand_hpwl(nets, coords))


def test_random_placement_legal(fp8, net40):
    pl = random_placement(net40, fp8, seed=1)
    validate_placement(pl, net40, fp8)


def test_random_placement_deterministic(fp8, net40):
    assert random_placement(net40, fp8, seed=3).assignment == random_placement(net40, fp8, seed=3).assignment


def test_random_placement_overflow():
    fp = make_floorplan(cols=2, rows=2, mem_col=None, mult_col=None)
    net = generate_synthetic(SyntheticParams(n_clb=5, n_inpad=1, n_outpad=1), seed=0)
    with pytest.raises(ValidationError, match="not enough"):
        random_placement(net, fp, seed=0)


def test_validate_placement_catches_bad_site(fp8, net40):
    pl = random_placement(net40, fp8, seed=1)
    bad = pl.copy()
    some_clb = next(b for b, k in net40.blocks.items() if k == "CLB")
    bad.assignment[some_clb] = (0, 1, 0)  # IO tile
    with pytest.raises(ValidationError, match="placed on"):
        validate_placement(bad, net40, fp8)


def test_validate_placement_catches_collision(fp8, net40):
    pl = random_placement(net40, fp8, seed=1)
    bad = pl.copy()
    clbs = [b for b, k in net40.blocks.items() if k == "CLB"]
    bad.assignment[clbs[0]] = bad.assignment[clbs[1]]
    with pytest.raises(ValidationError, match="share site"):
        validate_placement(bad, net40, fp8)


def test_metropolis_boundaries(rng):
    assert metropolis_accept(-1.0, 0.0, rng)
    assert not metropolis_accept(1.0, 0.0, rng)
    assert not metropolis_accept(0.5, -1.0, rng)
    # at high temperature almost everything passes
    n_acc = sum(metropolis_accept(0.1, 1e9, rng) for _ in range(100))
    assert n_acc > 95


def test_schedule_validation():
    with pytest.raises(ValidationError):
        AnnealSchedule(alpha_t=1.0)
    with pytest.raises(ValidationError):
        AnnealSchedule(inner_num=0)
    with pytest.raises(ValidationError):
        AnnealSchedule(algorithm="hillclimb")
    with pytest.raises(ValidationError):
        AnnealSchedule(exit_t=0)


@pytest.fixture(scope="module")
def small_case():
    fp = make_floorplan(cols=4, rows=4, mem_col=None, mult_col=None)
    net = generate_synthetic(SyntheticParams(n_clb=12, n_inpad=3, n_outpad=3), seed=2)
    return fp, net


def test_anneal_improves_and_is_legal(small_case):
    fp, net = small_case
    res = anneal(net, fp, AnnealSchedule(seed=0, inner_num=1.0))
    validate_placement(res.placement, net, fp)
    assert res.final_cost <= res.initial_cost
    assert res.final_cost == pytest.approx(hpwl(net, res.placement))
    assert res.attempted >= res.accepted > 0


def test_anneal_deterministic(small_case):
    fp, net = small_case
    a = anneal(net, fp, AnnealSchedule(seed=9, inner_num=1.0))
    b = anneal(net, fp, AnnealSchedule(seed=9, inner_num=1.0))
    assert a.placement.assignment == b.placement.assignment
    assert a.final_cost == b.final_cost
    c = anneal(net, fp, AnnealSchedule(seed=10, inner_num=1.0))
    assert c.placement.assignment != a.placement.assignment


def test_anneal_seeds_differ_in_cost(small_case):
    fp, net = small_case
    costs = {anneal(net, fp, AnnealSchedule(seed=s, inner_num=0.5)).final_cost for s in range(4)}
    assert len(costs) > 1


def test_snapshots_bracket_run(small_case):
    fp, net = small_case
    res = anneal(net, fp, AnnealSchedule(seed=1, inner_num=1.0), snapshot_every=200)
    assert len(res.snapshots) >= 2
    assert res.snapshots[-1].assignment == res.placement.assignment
    assert hpwl(net, res.snapshots[0]) == pytest.approx(res.initial_cost)
    for snap in res.snapshots:
        validate_placement(snap, net, fp)


def test_random_algorithm_skips_annealing(small_case):
    fp, net = small_case
    res = anneal(net, fp, AnnealSchedule(seed=4, algorithm="random"))
    validate_placement(res.placement, net, fp)
    assert res.attempted == 0
    assert res.initial_cost == res.final_cost == pytest.approx(hpwl(net, res.placement))


def test_random_algorithm_matches_initial_of_anneal(small_case):
    # same seed: the "random" algorithm returns the anneal's starting point
    fp, net = small_case
    rand = anneal(net, fp, AnnealSchedule(seed=6, algorithm="random"))
    ann = anneal(net, fp, AnnealSchedule(seed=6, algorithm="anneal", inner_num=0.5))
    assert rand.final_cost == pytest.approx(ann.initial_cost)


def test_placement_json_roundtrip(tmp_path, small_case):
    fp, net = small_case
    pl = random_placement(net, fp, seed=8)
    p = tmp_path / "pl.json"
    pl.save_json(p)
    assert Placement.load_json(p).assignment == pl.assignment
    with pytest.raises(ArtifactIOError):
        Placement.load_json(tmp_path / "none.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{]")
    with pytest.raises(ArtifactIOError):
        Placement.load_json(bad)


def test_placement_from_dict_validation():
    with pytest.raises(ValidationError):
        Placement.from_dict({})
    with pytest.raises(ValidationError):
        Placement.from_dict({"assignment": {"a": [1, 2]}})
