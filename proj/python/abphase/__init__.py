"""Aharonov-Bohm phase by potential holonomy and by spacetime flux."""

import json

from ._core import *  # noqa: F401,F403
from ._core import (
    Boost,
    Coupling,
    __version__,
    boosted,
    flux_phase,
    potential_phase,
    ruled_surface_equal_time,
    run_config,
    sweep_config,
)


def phases(scenario, boost=None, spec=None):
    """Flux split and potential-route phase of a built scenario, optionally boosted.

    Returns a dict with magnetic, electric, total and potential entries in radians.
    The coupling is q/hbar = 1, so phases equal reduced fluxes.
    """
    sc = boosted(scenario, boost) if boost is not None else scenario
    unit = Coupling.unit()
    args = (spec,) if spec is not None else ()
    d = flux_phase(ruled_surface_equal_time(sc.pair), sc.config, unit, *args)
    return {
        "magnetic": d.magnetic,
        "electric": d.electric,
        "total": d.total,
        "potential": potential_phase(sc.pair, sc.config, unit, sc.c),
    }


def run(config, timing=False):
    """Run a configuration given as a dict or JSON text; returns the report as a dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(run_config(text, timing))


def sweep(config, v_from=0.0, v_to=0.9, steps=10):
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(sweep_config(text, v_from, v_to, steps))
