"""Acceptance gate: one test per shipped guarantee, one printed line each.

Exact-rational guarantees use equality; golden decimal coordinates are
matched within 1e-9. Run with plain `pytest`; the pass/fail lines are
written to the live terminal regardless of capture settings.
"""

from __future__ import annotations

import random
import warnings
from fractions import Fraction

import pytest

from racktradeoff.cli import EXIT_MISMATCH, run
from racktradeoff.errors import InvalidConfig
from racktradeoff.flowgraph import verify
from racktradeoff.incomes import (
    candidate_sequence,
    feasibility_trim,
    involved_rack_count,
    min_mincut_incomes,
    rack_coeff_list,
    two_rack_min_incomes,
)
from racktradeoff.threshold import (
    alpha_star,
    basic_reference_curve,
    extremal_points,
    rack_curve,
    reference_curve,
    repair_metrics,
    special_case_curve,
    special_case_knees,
)

from conftest import build_config

F = Fraction
M = F(1)
TOL = 1e-9
TAUS = (F(1), F(3, 2), F(2), F(3))


@pytest.fixture
def announce(capsys):
    def _announce(line: str) -> None:
        with capsys.disabled():
            print(line)

    return _announce


def _gate(announce, number: int, desc: str, check) -> None:
    try:
        check()
    except BaseException:
        announce(f"[FAIL] criterion {number}: {desc}")
        raise
    announce(f"[PASS] criterion {number}: {desc}")


def _close(actual: Fraction, printed: float) -> bool:
    return abs(float(actual) - printed) <= TOL


def _match_knees(curve, printed: list[tuple[float, float]]) -> None:
    knees = [(b, a) for _, b, a in curve.knees]
    assert len(knees) == len(printed), f"{len(knees)} knees vs {len(printed)} printed"
    for (beta, alpha), (pb, pa) in zip(knees, printed):
        assert _close(beta, pb) and _close(alpha, pa), f"({beta}, {alpha}) vs ({pb}, {pa})"


def test_criterion_01_small_curve(announce, example1):
    def check():
        incomes = two_rack_min_incomes(example1)
        assert sorted(incomes.coeffs) == [F(2), F(3), F(4), F(5)]
        curve = rack_curve(example1)
        assert curve.L.values == (F(2), F(3), F(4), F(5))
        assert [b for _, b, _ in curve.knees] == [M / 8, M / 11, M / 13, M / 14]
        pieces = [(F(0), 4), (F(2), 3), (F(5), 2), (F(9), 1)]
        for seg, (g, span) in zip(curve.segments, pieces):
            assert seg.g == g and curve.k - seg.index == span
            assert seg.alpha_at(seg.beta_lo) == (M - g * seg.beta_lo) / span

    _gate(announce, 1, "k=4 curve: incomes {5,3,4,2}, knees M/8, M/11, M/13, M/14", check)


def test_criterion_02_duplicate_interval(announce, example2):
    def check():
        incomes = two_rack_min_incomes(example2)
        assert incomes.coeffs == (F(5), F(3), F(3))
        assert incomes.origin == "I1+I2"
        curve = rack_curve(example2)
        assert [s.index for s in curve.segments] == [0, 2]
        assert [b for _, b, _ in curve.knees] == [M / 9, M / 11]

    _gate(announce, 2, "k=3 curve: duplicate income deletes its interval, knees M/9, M/11", check)


def test_criterion_03_trimming(announce, trimming_config):
    def check():
        incomes = two_rack_min_incomes(trimming_config)
        assert sorted(incomes.coeffs) == [F(5), F(7), F(8)]
        trimmed = feasibility_trim(incomes, trimming_config)
        assert trimmed.values == (F(5), F(7))
        curve = rack_curve(trimming_config)
        _, mbr = extremal_points(curve, trimming_config)
        assert (mbr.beta_e, mbr.alpha) == (M / 19, 7 * M / 19)
        assert mbr.alpha == mbr.gamma[0]

    _gate(announce, 3, "income trimming: [5,7,8] -> [5,7], MBR (M/19, 7M/19) with alpha = gamma_1", check)


def test_criterion_04_greedy_blocks(announce, three_rack_config):
    def check():
        sums = {
            (): F(229, 5),
            (1,): F(242, 5),
            (2,): F(227, 5),
            (1, 2): F(229, 5),
        }
        for subset, expected in sums.items():
            assert candidate_sequence(three_rack_config, subset).total() == expected
        greedy, _ = min_mincut_incomes(three_rack_config, mode="greedy")
        exhaustive, audit = min_mincut_incomes(three_rack_config, mode="exhaustive")
        assert greedy.origin == exhaustive.origin == "I'_{2}"
        assert greedy.total() == exhaustive.total() == F(227, 5)
        assert dict(audit) == {tuple(s): v for s, v in sums.items()}

    _gate(announce, 4, "three-rack block search: sums 229/5, 242/5, 227/5, 229/5; both modes pick {2}", check)


FIG7_RACK = [
    (0.02500000000, 0.1000000000),
    (0.01724137931, 0.1034482759),
    (0.01388888889, 0.1111111111),
    (0.01219512195, 0.1219512195),
    (0.01136363636, 0.1363636364),
    (0.01086956522, 0.1521739130),
    (0.01063829787, 0.1702127660),
]

FIG7_STATIC = [
    (0.05, 0.1),
    (0.03448275862, 0.1034482759),
    (0.02702702703, 0.1081081081),
    (0.02272727273, 0.1136363636),
    (0.02, 0.12),
    (0.01666666667, 0.1333333333),
    (0.01470588235, 0.1470588235),
    (0.01351351351, 0.1621621622),
    (0.01282051282, 0.1794871795),
    (0.0125, 0.2),
]


def test_criterion_05_two_model_golden(announce, fig7_config):
    def check():
        _match_knees(rack_curve(fig7_config), FIG7_RACK)
        _match_knees(reference_curve("static", fig7_config), FIG7_STATIC)

    _gate(announce, 5, "k=10 golden curves: 7 rack knees and 10 static knees within 1e-9", check)


FIG8 = {
    F(1): [
        (0.05, 0.1),
        (0.03448275862, 0.1034482759),
        (0.02702702703, 0.1081081081),
        (0.02272727273, 0.1136363636),
        (0.02, 0.12),
        (0.01818181818, 0.1272727273),
        (0.01694915254, 0.1355932203),
        (0.01612903226, 0.1451612903),
        (0.015625, 0.15625),
        (0.01538461538, 0.1692307692),
    ],
    F(6, 5): [
        (0.04166666667, 0.1),
        (0.02873563218, 0.1034482759),
        (0.02252252252, 0.1081081081),
        (0.01893939394, 0.1136363636),
        (0.01700680272, 0.1224489796),
        (0.01572327044, 0.1320754717),
        (0.01488095238, 0.1428571429),
        (0.01436781609, 0.1551724138),
        (0.01412429379, 0.1694915254),
    ],
    F(2): FIG7_RACK,
    F(10): [
        (0.01666666667, 0.1),
        (0.006666666667, 0.1066666667),
        (0.005494505494, 0.1098901099),
        (0.004464285714, 0.1160714286),
        (0.004032258065, 0.1209677419),
        (0.003597122302, 0.1294964029),
        (0.003401360544, 0.1360544218),
        (0.003205128205, 0.1474358974),
        (0.003125, 0.15625),
        (0.003067484663, 0.1717791411),
    ],
}


def test_criterion_06_tau_sweep_golden(announce):
    def check():
        for tau, printed in FIG8.items():
            cfg = build_config(10, 11, [(6, 5), (6, 5)], tau)
            _match_knees(rack_curve(cfg), printed)

    _gate(announce, 6, "tau sweep golden: all polyline vertices at tau in {1, 6/5, 2, 10} within 1e-9", check)


FIG9 = {
    F(1): [
        (0.025, 1.65),
        (0.02272727273, 1.5),
        (0.02127659574, 1.404255319),
        (0.02040816327, 1.346938776),
        (0.02, 1.32),
    ],
    F(2): [
        (0.02, 1.44),
        (0.01724137931, 1.241379310),
        (0.015625, 1.125),
        (0.01470588235, 1.058823529),
        (0.01428571429, 1.028571429),
    ],
    F(5): [
        (0.0125, 1.125),
        (0.01, 0.9),
        (0.008695652174, 0.7826086957),
        (0.008, 0.72),
        (0.007692307692, 0.6923076923),
    ],
    F(10): [
        (0.007692307692, 0.9230769231),
        (0.005882352941, 0.7058823529),
        (0.005, 0.6),
        (0.004545454545, 0.5454545455),
        (0.004347826087, 0.5217391304),
    ],
}


def test_criterion_07_repair_cost_golden(announce):
    def check():
        for tau, printed in FIG9.items():
            cfg = build_config(5, 12, [(7, 6), (7, 6)], tau)
            curve = rack_curve(cfg)
            points = [(b, repair_metrics(cfg, b).cost[0]) for _, b, _ in curve.knees]
            assert len(points) == len(printed)
            for (beta, cost), (pb, pc) in zip(points, printed):
                assert _close(beta, pb) and _close(cost, pc), f"({beta}, {cost}) vs ({pb}, {pc})"

    _gate(announce, 7, "repair-cost golden: five (beta_e, cost_1) points per tau in {1,2,5,10} within 1e-9", check)


def test_criterion_08_uniform_closed_form(announce):
    def check():
        for d in range(2, 9):
            for k in range(2, d + 1):
                curve = basic_reference_curve(k, d, M)
                for seg in curve.segments:
                    i = seg.index
                    gamma = 2 * M * d / F((2 * k - i - 1) * i + 2 * k * (d - k + 1))
                    assert seg.beta_lo * d == gamma
                    assert seg.g == F(i * (2 * d - 2 * k + i + 1), 2)

    _gate(announce, 8, "uniform-bandwidth closed form matches the generic engine for 2 <= k <= d <= 8", check)


def _random_two_rack(rng: random.Random):
    while True:
        dc1 = rng.randint(1, 2)
        dc2 = rng.randint(dc1, 3)
        d = dc1 + dc2 + 1
        n1 = rng.randint(dc1 + 1, 4)
        n2 = rng.randint(dc2 + 1, 4)
        if n1 + n2 > 7:
            continue
        k = rng.randint(1, min(4, d, n1 + n2))
        try:
            return build_config(k, d, [(n1, dc1), (n2, dc2)], rng.choice(TAUS))
        except InvalidConfig:
            continue


def test_criterion_09_oracle_equivalence(announce):
    def check():
        rng = random.Random(20260823)
        for i in range(100):
            cfg = _random_two_rack(rng)
            structured = verify(cfg, count=10, seed=i, mode="structured")
            assert structured.passed, f"structured mismatch on {cfg}"
            if cfg.total_nodes <= 8:
                exhaustive = verify(cfg, count=10, seed=i, mode="exhaustive")
                assert exhaustive.passed, f"exhaustive undercut on {cfg}"
                for a, b in zip(exhaustive.samples, structured.samples):
                    assert a.oracle >= b.oracle

    _gate(announce, 9, "flow-graph oracle equals the analytic curve on 100 random two-rack systems", check)


def _random_multi_rack(rng: random.Random):
    while True:
        r = rng.randint(2, 5)
        dcs = sorted(rng.randint(1, 2) for _ in range(r))
        d = sum(dcs) + r - 1
        racks = [(dc + rng.randint(1, 3), dc) for dc in dcs]
        n = sum(nodes for nodes, _ in racks)
        k = rng.randint(1, min(d, n))
        try:
            cfg = build_config(k, d, racks, rng.choice(TAUS))
        except InvalidConfig:
            continue
        if involved_rack_count(cfg) <= 5:
            return cfg


def test_criterion_10_greedy_equals_exhaustive(announce):
    def check():
        rng = random.Random(9)
        for _ in range(100):
            cfg = _random_multi_rack(rng)
            greedy, _ = min_mincut_incomes(cfg, mode="greedy")
            exhaustive, _ = min_mincut_incomes(cfg, mode="exhaustive")
            assert greedy.total() == exhaustive.total(), f"selection gap on {cfg}"

    _gate(announce, 10, "greedy block selection matches exhaustive subsets on 100 random systems", check)


def test_criterion_11_model_coincidence(announce):
    def check():
        for k, d, racks in [(10, 11, [(6, 5), (6, 5)]), (4, 4, [(3, 1), (3, 2)]), (3, 6, [(4, 2), (5, 4)])]:
            cfg = build_config(k, d, racks, 1)
            rack = rack_curve(cfg)
            assert rack.knees == reference_curve("static", cfg).knees
            assert rack.knees == reference_curve("basic", cfg).knees
        for tau in (F(2), F(5)):
            cfg = build_config(5, 12, [(7, 6), (7, 6)], tau)  # k <= d_c^1 + 1
            assert rack_curve(cfg).knees == reference_curve("static", cfg).knees

    _gate(announce, 11, "tau=1 collapses all three models; small k collapses rack onto static", check)


def test_criterion_12_closed_form_crosscheck(announce, monkeypatch):
    def check():
        for tau in (F(1), F(5, 4), F(3, 2)):
            cfg = build_config(4, 4, [(2, 1), (3, 2)], tau)
            generic = rack_curve(cfg)
            closed = {i: (beta, g) for i, beta, g in special_case_knees(cfg)}
            for seg in generic.segments:
                beta, g = closed[seg.index]
                assert beta == seg.beta_lo and g == seg.g
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                assert special_case_curve(cfg).knees == generic.knees
        # a skewed closed form must be reported, never silently accepted
        cfg = build_config(4, 4, [(2, 1), (3, 2)], F(3, 2))
        skewed = [(i, beta * (2 if i == 0 else 1), g) for i, beta, g in special_case_knees(cfg)]
        monkeypatch.setattr("racktradeoff.threshold.special_case_knees", lambda _: skewed)
        with pytest.warns(RuntimeWarning, match="disagrees"):
            special_case_curve(cfg)

    _gate(announce, 12, "adjacent-degree closed form agrees with the engine at every exposed knee", check)


def test_criterion_13_negative_control(announce, tmp_path, capsys, monkeypatch):
    def check():
        import json

        import racktradeoff.flowgraph as flowgraph
        from racktradeoff.incomes import CoeffList

        path = tmp_path / "cfg.json"
        path.write_text(
            json.dumps(
                {
                    "file_size": "1",
                    "k": 4,
                    "d": 4,
                    "tau": "2",
                    "cheap_cost": "1",
                    "expensive_cost": "10",
                    "racks": [{"nodes": 3, "cheap_degree": 1}, {"nodes": 3, "cheap_degree": 2}],
                }
            ),
            encoding="utf-8",
        )
        real = rack_coeff_list

        def corrupted(cfg):
            good = real(cfg)
            return CoeffList(values=good.values[:-1] + (good.values[-1] + 1,), k=good.k)

        monkeypatch.setattr(flowgraph, "rack_coeff_list", corrupted)
        code = run(
            ["verify", "--config", str(path), "--samples", "5", "--seed", "11", "--mode", "structured"]
        )
        out = capsys.readouterr().out
        assert code == EXIT_MISMATCH
        assert int(out.split("mismatches: ")[1].split("\n")[0]) >= 1
        assert "result: fail" in out

    _gate(announce, 13, "corrupting one coefficient makes verify exit 3 with a recorded mismatch", check)
