import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mazer import ManifoldParams, mixing_angle, parse, trig_pair
from mazer.claimcheck import (
    ClaimReport,
    Verdict,
    run_all_claims,
    verify_derivative_relations,
    verify_mesa_decoupling,
    verify_solver_equivalence,
    verify_trig_identities,
    verify_vanishing_claim,
)

L = 10.0
SINE = parse("sine", L)
MESA = parse("mesa", L)


def test_trig_on_resonance_is_exact():
    rep = verify_trig_identities(ManifoldParams(g=1, delta=0), 2000, seed=1)
    assert rep.verdict is Verdict.HOLDS
    assert rep.max_abs_residual <= 1e-15


def test_trig_many_samples():
    rep = verify_trig_identities(ManifoldParams(g=1, delta=3, n=2), 10_000, seed=0)
    assert rep.verdict is Verdict.HOLDS and rep.samples == 10_000 and rep.excluded == 0


def test_trig_counts_degenerate_samples():
    # beta = 0 and delta = 0: every sample is degenerate
    rep = verify_trig_identities(ManifoldParams(g=0, delta=0), 50, seed=0)
    assert rep.excluded == 50 and rep.samples == 0 and rep.verdict is Verdict.HOLDS


def test_trig_witness_reproduces_residual():
    p = ManifoldParams(g=0.8, delta=-1.7, n=1)
    rep = verify_trig_identities(p, 5000, seed=7)
    u = rep.witness["u"]
    theta = mixing_angle(p, u)
    c, s = trig_pair(p, u)
    again = max(abs(math.cos(2 * theta) - c), abs(math.sin(2 * theta) - s))
    assert again == rep.max_abs_residual


@pytest.mark.parametrize("seed", range(5))
def test_trig_five_seeds(seed):
    rng = np.random.default_rng(100 + seed)
    p = ManifoldParams(g=rng.uniform(-3, 3), delta=rng.uniform(-5, 5), n=int(rng.integers(0, 6)))
    assert verify_trig_identities(p, 10_000, seed).verdict is Verdict.HOLDS


@settings(max_examples=30, deadline=None)
@given(g=st.floats(-3, 3), delta=st.floats(-5, 5), n=st.integers(0, 4), seed=st.integers(0, 2**31))
def test_trig_holds_everywhere(g, delta, n, seed):
    rep = verify_trig_identities(ManifoldParams(g=g, delta=delta, n=n), 200, seed)
    assert rep.verdict is Verdict.HOLDS


def test_same_seed_is_reproducible():
    p = ManifoldParams(g=1, delta=1)
    a = verify_derivative_relations(p, SINE, 300, seed=4)
    b = verify_derivative_relations(p, SINE, 300, seed=4)
    assert a == b
    assert verify_trig_identities(p, 300, 4) == verify_trig_identities(p, 300, 4)


@pytest.mark.parametrize(
    "params, mode",
    [
        (ManifoldParams(g=1, delta=1), MESA),
        (ManifoldParams(g=1, delta=0), SINE),
    ],
)
def test_derivative_relations_trivial(params, mode):
    rep = verify_derivative_relations(params, mode, 200)
    assert rep.verdict is Verdict.HOLDS
    assert rep.witness["dtheta"] == 0 and rep.witness["d2theta"] == 0


@pytest.mark.parametrize("mode", ["sine", "gauss", "sine2"])
def test_derivative_relations_smooth(mode):
    rep = verify_derivative_relations(ManifoldParams(g=1, delta=1), parse(mode, L), 1000)
    assert rep.verdict is Verdict.HOLDS
    assert rep.max_abs_residual <= 1e-6


def test_mesa_decoupling():
    for p in (ManifoldParams(g=1, delta=1), ManifoldParams(g=0.1, delta=5), ManifoldParams(g=2, delta=0)):
        rep = verify_mesa_decoupling(p, L)
        assert rep.verdict is Verdict.HOLDS and rep.max_abs_residual == 0


def test_mesa_decoupling_has_teeth():
    p = ManifoldParams(g=1, delta=1)
    rep = verify_mesa_decoupling(p, L, mode=SINE)
    assert rep.verdict is Verdict.FAILS
    assert rep.max_abs_residual > 1e-3
    # closed form at the witness point
    z = rep.witness["z"]
    u = math.sin(math.pi * z / L)
    du = math.pi / L * math.cos(math.pi * z / L)
    lam2 = 0.25 + u * u
    assert rep.witness["dtheta"] == pytest.approx(-du / (4 * lam2), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(g=st.floats(-3, 3), delta=st.floats(-5, 5), n=st.integers(0, 4), length=st.floats(0.5, 50))
def test_mesa_decoupling_always_holds(g, delta, n, length):
    rep = verify_mesa_decoupling(ManifoldParams(g=g, delta=delta, n=n), length)
    assert rep.verdict is Verdict.HOLDS


@pytest.mark.parametrize(
    "params, mode",
    [
        (ManifoldParams(g=1, delta=1), MESA),
        (ManifoldParams(g=1, delta=0), SINE),
    ],
)
def test_vanishing_claim_trivial(params, mode):
    rep = verify_vanishing_claim(params, mode, 100)
    assert rep.verdict is Verdict.HOLDS
    assert rep.max_abs_residual == 0


def test_vanishing_claim_conditional():
    rep = verify_vanishing_claim(ManifoldParams(g=1, delta=1), SINE, 1000, seed=0)
    assert rep.verdict is Verdict.HOLDS_ONLY_WHEN
    assert rep.condition == "u constant or delta = 0"
    assert rep.label == "HoldsOnlyWhen(u constant or delta = 0)"
    # theta' = -beta delta u' / (4 lambda^2); for the sine mode the peak sits at
    # the walls where u = 0, u' = pi/L: |theta'| = beta pi / (L delta)
    assert rep.witness["max_abs_dtheta"] == pytest.approx(math.pi / 10, abs=1e-9)
    assert rep.max_abs_residual > rep.tolerance


def test_solver_equivalence_examples():
    on = verify_solver_equivalence(ManifoldParams(g=1, delta=0), SINE, 1.0)
    assert on.verdict is Verdict.HOLDS
    assert on.notes["literal_flux_error"] == on.notes["derived_flux_error"]
    mesa = verify_solver_equivalence(ManifoldParams(g=1, delta=0.5), MESA, 1.0)
    assert mesa.verdict is Verdict.HOLDS
    assert mesa.notes["analytic_vs_bare_amplitude"] <= 1e-12
    off = verify_solver_equivalence(ManifoldParams(g=1, delta=1), SINE, 1.0)
    assert off.verdict is Verdict.HOLDS
    assert off.notes["literal_flux_error"] > off.notes["derived_flux_error"]
    assert off.notes["literal_max_prob_deviation"] > 1e-3


def test_run_all_claims_mesa():
    reports = run_all_claims(ManifoldParams(g=1, delta=0), MESA)
    assert [r.claim_id for r in reports] == sorted(r.claim_id for r in reports)
    assert len(reports) == 5
    assert all(r.verdict is Verdict.HOLDS for r in reports)


def test_report_serialisation():
    rep = verify_mesa_decoupling(ManifoldParams(g=1, delta=1), L, mode=SINE)
    row = rep.csv_row()
    assert len(row) == len(ClaimReport.CSV_HEADER)
    assert row[0] == "c3_mesa_decoupling" and row[5] == "Fails"
    assert "z=" in row[-1]
    plain = rep.to_text()
    assert "\033[" not in plain and "Fails" in plain
    assert "\033[31m" in rep.to_text(color=True)
