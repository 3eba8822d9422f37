import math

import pytest

import abphase as ab


def solenoid(beta=0.5):
    s = ab.SolenoidScenario()
    s.packet_speed = beta * ab.c_SI
    return s


def test_boost_event_matches_hand_values():
    b = ab.Boost.along_x(0.6, 1.0)
    e = ab.boost_event(ab.Event(1.0, ab.Vec3(0.0, 2.0, 0.0)), b)
    assert b.gamma == pytest.approx(1.25, rel=1e-15)
    assert e.t == pytest.approx(1.25, rel=1e-14)
    assert e.pos.x == pytest.approx(-0.75, rel=1e-14)
    assert e.pos.y == 2.0


def test_solenoid_rest_frame_phase():
    sc = ab.build_solenoid_scenario(solenoid())
    p = ab.phases(sc)
    assert p["total"] == pytest.approx(math.pi * 1e-2, abs=1e-8)
    assert p["potential"] == pytest.approx(math.pi * 1e-2, abs=1e-8)
    assert abs(p["electric"]) <= 1e-10


def test_solenoid_total_is_frame_invariant_and_parts_are_not():
    s = solenoid()
    sc = ab.build_solenoid_scenario(s)
    rest = ab.phases(sc)["total"]
    moving = ab.phases(sc, ab.Boost.along_x(0.6))
    assert moving["total"] == pytest.approx(rest, rel=1e-6)
    assert abs(moving["electric"]) > 1e-3
    special = ab.phases(sc, ab.solenoid_special_frame(s))
    assert abs(special["magnetic"]) <= 1e-6 * abs(special["total"])


def test_capacitor_null_electric_frame():
    s = ab.CapacitorScenario()
    s.c = 1.0
    sc = ab.build_capacitor_scenario(s)
    b = ab.capacitor_null_electric_boost(s)
    assert b.velocity.x == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-14)
    p = ab.phases(sc, b)
    assert p["total"] == pytest.approx(-0.5, rel=1e-6)
    assert abs(p["electric"]) <= 1e-6 * abs(p["total"])


def test_domain_errors_surface_as_exceptions():
    with pytest.raises(ab.DomainError):
        ab.Boost.along_x(1.0, 1.0)
    s = ab.CapacitorScenario()
    s.capacitor = ab.CapacitorConfig.from_chord(1.0, math.pi / 4, 1.0, -0.5, 1.0)
    with pytest.raises(ab.Error):
        ab.capacitor_null_electric_boost(s)


def test_run_config_report():
    cfg = {
        "schema_version": 1,
        "coupling": {"q_over_hbar": 1.0},
        "scenario": {"kind": "solenoid"},
        "boosts": [0.0, 0.5],
    }
    rep = ab.run(cfg)
    assert len(rep["rows"]) == 2
    assert rep["summary"]["max_invariance_residual"] <= 1e-6
    totals = [r["phase_total"] for r in rep["rows"]]
    assert totals[1] == pytest.approx(totals[0], rel=1e-6)


def test_config_errors_name_the_field():
    with pytest.raises(ab.ConfigError, match="scenario.colour"):
        ab.run({"schema_version": 1, "scenario": {"kind": "solenoid", "colour": 1}})


def test_appendix_suite_passes():
    rep = ab.run_suite("appendixA", 3, 4)
    assert rep.passed
    assert len(rep.cases) == 8


def test_gauge_shift_with_python_callables_keeps_the_phase():
    sc = ab.build_solenoid_scenario(solenoid())
    unit = ab.Coupling.unit()
    before = ab.potential_phase(sc.pair, sc.config, unit)
    shifted = ab.gauge_shift(sc.config, lambda e: 1e3 * e.pos.x * e.t,
                             lambda e: (1e3 * e.pos.x, 1e3 * e.t, 0.0, 0.0))
    assert ab.potential_phase(sc.pair, shifted, unit) == pytest.approx(before, abs=1e-10)
    surf = ab.ruled_surface_equal_time(sc.pair)
    assert ab.flux_phase(surf, shifted, unit).total == pytest.approx(before, abs=1e-8)
