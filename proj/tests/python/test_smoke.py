import json

import numpy as np
import pytest

import fsupart as fp


def sys2():
    A = np.array([[0.5, 0.1], [0.0, 0.5]])
    B = np.eye(2)
    return fp.LinearModel(A, B)


def test_pipeline_on_sys2():
    g = fp.build_linear_graph(sys2())
    assert (g.n, g.p) == (2, 2)
    fsus = fp.select_fsus(g)
    assert len(fsus) == 2
    p = fp.greedy_refined(fsus, alpha=1.0)
    assert p.blocks in ([[0], [1]], [[0, 1]])
    single = fp.single_block_partition(fsus)
    assert fp.index_ratio(single, 1.0) == pytest.approx(single.w_intra / (1 + single.w_inter) + 1.0 / (1 + single.w_size))


def test_exact_matches_brute_force():
    model = fp.gen_random_fsu(n_fsus=7, edge_density=0.4, w_lo=0.01, w_hi=1.0, seed=11)
    fsus = fp.select_fsus(fp.build_linear_graph(model))
    for alpha in (0.5, 3.0):
        bnb = fp.branch_and_bound(fsus, alpha)
        brute = fp.brute_force_partition(fsus, alpha)
        assert bnb["optimal"]
        assert bnb["value"] == pytest.approx(brute["value"], abs=1e-9)
        assert bnb["partition"] == brute["partition"]


def test_modular_exact_ladder():
    fsus = fp.select_fsus(fp.build_linear_graph(fp.gen_modular(levels=2)))
    assert len(fsus) == 16
    r = fp.branch_and_bound(fsus, 3.2)
    assert r["optimal"]
    assert len(r["partition"]) == 4
    assert fp.branch_and_bound(fsus, fp.alpha_big(fsus))["partition"].blocks == [[i] for i in range(16)]


def test_sweep_dedupes():
    fsus = fp.select_fsus(fp.build_linear_graph(fp.gen_modular(levels=2)))
    runs, distinct = fp.alpha_sweep(fsus, [1.0, 1.0, 0.001], "refined")
    assert len(runs) == 2
    assert 1 <= len(distinct) <= 2


def test_errors_are_translated():
    with pytest.raises(fp.FsupartError, match="invalid_argument"):
        fp.greedy_partition(fp.select_fsus(fp.build_linear_graph(sys2())), alpha=1.0, size_measure="bogus")
    with pytest.raises(ValueError):
        fp.LinearModel(np.eye(2), np.eye(3))


def test_qp_solve_box():
    x, primal, dual, _ = fp.qp_solve(np.eye(2), np.array([-2.0, 0.5]), np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
    assert x == pytest.approx([1.0, -0.5], abs=1e-6)


def test_simulate_short_scenario():
    scn = json.loads(fp.default_scenario_json())
    scn.update(horizon=5, steps=4)
    model = sys2()
    fsus = fp.select_fsus(fp.build_linear_graph(model))
    dist = fp.simulate(model, fp.singleton_partition(fsus), json.dumps(scn))
    cent = fp.simulate(model, fp.single_block_partition(fsus), json.dumps(scn))
    assert dist["n_csu"] == 2 and cent["n_csu"] == 1
    assert dist["states"].shape == (2, 5)
    assert dist["cumulative_cost"] == pytest.approx(cent["cumulative_cost"], rel=1e-2)
    assert dist["csv"].startswith("step,stage_cost,cum_cost")


def test_run_cli():
    status, out, err = fp.run_cli(["gen", "modular", "--levels", "2"])
    assert status == 0, err
    status, out, _ = fp.run_cli(["fsu"], out)
    assert status == 0
    status, out, _ = fp.run_cli(["partition", "exact", "--alpha", "3.2"], out)
    assert status == 0
    assert json.loads(out)["n_blocks"] == 4
    assert fp.run_cli(["partition", "--nope"])[0] == 2
