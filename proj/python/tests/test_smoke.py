import math
import os
from pathlib import Path

import pytest

import wsnchain

SOURCE = Path(os.environ.get("WSN_SOURCE_DIR", Path(__file__).resolve().parents[2]))
SHIPPED = SOURCE / "configs" / "paper_sec9.cfg"


@pytest.fixture
def cfg():
    return wsnchain.load_config(str(SHIPPED))


def test_plan_shape(cfg):
    p = wsnchain.plan(cfg)
    assert p["s"] == 5
    assert len(p["node_count"]) == cfg.K == 10
    assert p["total_N"] == sum(p["node_count"])
    assert all(n % p["s"] == 0 for n in p["node_count"])
    assert p["cycle_min_s"] == pytest.approx(4.35)
    assert p["cycle_min_printed_s"] == pytest.approx(4.20)


def test_preset_switch(cfg):
    cfg.preset = "physical"
    assert cfg.preset == "physical"
    assert wsnchain.plan(cfg)["s"] == 4
    with pytest.raises(ValueError):
        cfg.preset = "sideways"


def test_plan_csv_is_stable(cfg):
    first = wsnchain.plan_csv(cfg)
    assert first.startswith("segment,N_i,E_i_J,n_di\n")
    assert first.splitlines()[-1].startswith("TOTAL,")
    assert wsnchain.plan_csv(cfg) == first


def test_simulate_modes_agree_on_short_horizon(cfg):
    ev = wsnchain.simulate(cfg, seed=3, mode="event", horizon_cycles=25)
    assert ev["cycles_completed"] == 25
    assert ev["delivered_total"] == 25 * cfg.K
    assert ev["chain_collisions"] == 0
    full = wsnchain.simulate(cfg, seed=3)
    assert full["achieved_lifetime_s"] > 0
    assert 0 < full["utilization_eta"] <= 1


def test_formulas():
    assert wsnchain.coverage_fraction(0.008, 10) == pytest.approx(1 - math.exp(-0.8 * math.pi))
    assert wsnchain.density_for_coverage(0.9, 10) == pytest.approx(math.log(10) / (100 * math.pi))
    assert wsnchain.tx_packet_energy(20) == pytest.approx(47.18592e-6)
    steps = wsnchain.transfer_schedule(4)
    assert len(steps) == 7
    assert sum(1 for s in steps for (_, to) in s if to == 0) == 4


def test_errors():
    with pytest.raises(wsnchain.ConfigError, match="radio.foo"):
        wsnchain.parse_config("[radio]\nfoo = 1\n")
    with pytest.raises(wsnchain.DomainError):
        wsnchain.coverage_fraction(-1, 10)
