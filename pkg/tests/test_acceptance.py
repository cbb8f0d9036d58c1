"""Acceptance criteria 1-9.  Each test prints one PASS/FAIL line and asserts it."""

import time

import pytest

from mlrhp import harness as hz

CFG = hz.ExperimentConfig().with_env()


@pytest.fixture(scope="module")
def regularity():
    return hz.exp_regularity_suite(CFG)


def _verdict(capsys, k, ok, detail):
    with capsys.disabled():
        print("\nCRITERION %d: %s  %s" % (k, "PASS" if ok else "FAIL", detail))
    assert ok, detail


def _fmt(v):
    return "n/a" if v is None else "%.3g" % v


def test_criterion_1_oracle(capsys):
    r = hz.exp_oracle(CFG, ns=(4, 8, 12, 16, 24, 32), trials=3, seed=1)
    c = r.checks
    _verdict(capsys, 1, r.passed, "max residual %s, zeros certified %s, %.1f s"
             % (_fmt(c["C1.residuals"]["value"]), c["C1.zeros"]["value"], c["C1.runtime"]["value"]))


def test_criterion_2_outer(capsys):
    t0 = time.time()
    r = hz.exp_outer_asymptotics(CFG)
    dt = time.time() - t0
    ps = ", ".join("%s:p=%s" % (k, _fmt(f["p"])) for k, f in r.fits.items())
    _verdict(capsys, 2, r.passed and dt < 600,
             "%d/%d probes pass (%s); %.0f s" % (r.checks["C2.probes_passing"]["value"], len(r.fits), ps, dt))


def test_criterion_3_edges(capsys):
    soft = hz.exp_edge_asymptotics(CFG, "soft")
    hard = hz.exp_edge_asymptotics(CFG, "hard")
    parts = {**soft.checks, **hard.checks}
    fits = {**soft.fits, **hard.fits}
    total = lambda k: sum(1 for f in fits if f.startswith(k.split(".")[1] + ":"))
    detail = ", ".join("%s %d/%d" % (k, v["value"], total(k)) for k, v in parts.items())
    notes = "; ".join(hard.notes)
    _verdict(capsys, 3, soft.passed and hard.passed, detail + ("  [%s]" % notes if notes else ""))


def test_criterion_4_outer_jumps(capsys, regularity):
    c = regularity.checks
    ok = c["C4.jump_residual"]["pass"] and c["C4.N_infinity"]["pass"]
    _verdict(capsys, 4, ok, "jump residual %s over %d nodes, |N(1e4) - I| = %s"
             % (_fmt(c["C4.jump_residual"]["value"]), c["C4.jump_residual"]["nodes"], _fmt(c["C4.N_infinity"]["value"])))


def test_criterion_5_matching(capsys, regularity):
    c = regularity.checks
    keys = ["C5.matching_Ux0", "C5.matching_Uxi", "C5.matching_U0"]
    detail = ", ".join("%s ratios %s" % (k.split("_")[1], [round(x, 3) for x in c[k]["value"]] or "unavailable")
                       for k in keys)
    _verdict(capsys, 5, all(c[k]["pass"] for k in keys), detail)


def test_criterion_6_lens(capsys, regularity):
    c = regularity.checks["C6.lens_decay"]
    _verdict(capsys, 6, c["pass"], "slope %s, R^2 %.6f over %d lip nodes" % (_fmt(c["value"]), c["r2"], c["nodes"]))


def test_criterion_7_small_norm(capsys, regularity):
    c = regularity.checks
    ok = c["C7.closed_form"]["pass"] and c["C7.R_rates"]["pass"] and c["C7.grid_doubling"]["pass"]
    detail = "closed form err %s; R rates %s" % (_fmt(c["C7.closed_form"]["value"]),
                                               c["C7.R_rates"].get("reason") or c["C7.R_rates"]["value"])
    if "diag.R_without_U0" in c:
        d = c["diag.R_without_U0"]
        detail += "; diagnostic without U0 (not counted): p = %s, grid change %s" % (
            [round(x, 3) for x in d["value"]], _fmt(d["grid_doubling"]))
    _verdict(capsys, 7, ok, detail)


def test_criterion_8_sign_chart(capsys, regularity):
    c = regularity.checks["C8.sign_chart"]
    _verdict(capsys, 8, c["pass"], "min Re phi on lips %s, max |Re phi| on conductors %s"
             % (_fmt(c["value"]), _fmt(c["conductor"])))


def test_criterion_9_zeros(capsys):
    r = hz.exp_zero_distribution(CFG)
    c = r.checks
    ok = c["C9.largest_zero_gap"]["pass"] and c["C9.kolmogorov"]["pass"]
    _verdict(capsys, 9, ok, "gaps %s, Kolmogorov %s" % ([round(g, 4) for g in c["C9.largest_zero_gap"]["value"]],
                                                        [round(k, 4) for k in c["C9.kolmogorov"]["value"]]))
