import json
import math

import pytest

import jointslab


def test_coordinate_flats():
    cfg = jointslab.generate("coordinate-flats", d=6, k=2, m=3)
    info = jointslab.summary(cfg)
    assert info == {"varieties": 3, "joints": 1, "multiplicities": [1], "components": 1}
    totals = jointslab.ledger_totals(cfg, 2)
    assert all(sum(row.values()) == 6 for row in totals.values())


def test_plane_totals_with_random_handicaps():
    cfg = jointslab.generate("random-flats", d=6, m=3, flats=7, points=3, seed=9)
    info = jointslab.summary(cfg)
    alpha = [(-1) ** i * i for i in range(info["joints"])]
    for n in (1, 2, 3):
        for row in jointslab.ledger_totals(cfg, n, alpha).values():
            assert sum(row.values()) == math.comb(n + 2, 2)


@pytest.mark.parametrize("h", [6, 7])
def test_rank_on_generic_hyperplanes(h):
    cfg = jointslab.generate("generic-hyperplanes", d=6, h=h, m=3)
    for n in (1, 2):
        out = jointslab.rank_check(cfg, n, balanced=True)
        assert out["pass"]
        assert out["rank"] == math.comb(n + 6, 6)


def test_hyperplane_bound():
    cfg = jointslab.generate("generic-hyperplanes", d=6, h=8, m=3)
    out = jointslab.bound(cfg)
    assert out["joints"] == 28
    assert out["pass"]
    assert out["constant"].startswith("1.8257418")


def test_balance_single_joint():
    cfg = jointslab.generate("coordinate-flats", d=6, k=2, m=3)
    out = jointslab.balance(cfg, 2)
    assert out["status"] == "Balanced"
    assert out["alpha"] == [0]


def test_vanishing_order():
    assert jointslab.vanishing_order("x1*x2 + x1^3", 2, [0, 0]) == 2
    assert jointslab.vanishing_order("x1 - 1", 1, [1]) == 1
    assert jointslab.vanishing_order("0", 2, [0, 0]) is None


def test_generated_config_is_json():
    cfg = json.loads(jointslab.generate("grid", d=2, t=3, seed=7))
    assert len(cfg["joints"]) == 9


def test_errors_surface_as_exceptions():
    with pytest.raises(jointslab.JointslabError):
        jointslab.summary("{not json")
    with pytest.raises(jointslab.JointslabError):
        jointslab.generate("generic-hyperplanes", d=3, h=5, m=3, prime=101)
