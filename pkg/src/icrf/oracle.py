"""
Independent numerical verifiers for the analytical claims the library relies
on: optimality of independent max-power Gaussian inputs for the cut-set
terms, the elementary inequality behind it, the closed forms, and the nesting
of the regime conditions. Every report is a JSON-ready dict and is
reproducible bit for bit from its (seed, n) arguments.
"""

import math

import numpy as np

from . import mi_eval as mi
from . import regimes as rg
from . import regions
from .channel_model import LINKS, NetworkParams, PHASE, RAYLEIGH, fading_model, unit_fading

PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"


def random_covariance(rng, powers):
    """Random Hermitian psd covariance with diagonal ``powers``.

    Draw G with iid CN(0, 1) entries, form G G^H and rescale rows and
    columns so the diagonal equals the powers. Off-diagonals are nonzero
    almost surely.
    """
    G = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) / math.sqrt(2)
    C = G @ G.conj().T
    d = np.sqrt(np.asarray(powers, float) / np.real(np.diag(C)))
    C = d[:, None] * C * d[None, :]
    return mi.InputCovariance(0.5 * (C + C.conj().T))


def _paired_gap(term, model, params, cov, n, seed, start):
    """Mean and standard error of I(diag cov) - I(cov) on common draws."""
    base = mi.mc_samples(term, model, params, None, n, seed, start)
    alt = mi.mc_samples(term, model, params, cov, n, seed, start)
    d = base - alt
    return float(d.mean()), float(d.std(ddof=1) / math.sqrt(n))


def verify_independence_optimal(model, params, terms=None, n_cov=100, n_draws=10_000,
                                seed=0, sigmas=3.0):
    """Check that diagonal max-power inputs dominate correlated inputs.

    For every sampled covariance and term, the paired difference
    I(diagonal) - I(sampled) must not fall below ``-sigmas`` standard errors.
    A difference below the band is re-estimated once with ten times as many
    fresh draws before it is reported as a violation. Differences inside the
    band are counted as indeterminate (no resolvable gap either way).
    """
    if n_cov < 20 or n_draws < 10_000:
        raise ValueError("need n_cov >= 20 and n_draws >= 10^4")
    model = fading_model(model)
    terms = list(terms) if terms is not None else mi.cut_set_terms()
    rng = np.random.default_rng([seed, 0xC0])
    covs = [random_covariance(rng, params.powers) for _ in range(n_cov)]
    counts = {PASS: 0, FAIL: 0, INDETERMINATE: 0}
    violations = []
    worst = math.inf
    escalations = 0
    for t in terms:
        for i, cov in enumerate(covs):
            gap, se = _paired_gap(t, model, params, cov, n_draws, seed, 0)
            if gap < -sigmas * se:
                escalations += 1
                gap, se = _paired_gap(t, model, params, cov, 10 * n_draws, seed, n_draws)
            z = gap / se if se > 0 else (math.inf if gap >= 0 else -math.inf)
            worst = min(worst, z)
            if gap < -sigmas * se:
                counts[FAIL] += 1
                violations.append({"term": t.name, "cov_index": i, "gap": gap,
                                   "std_error": se})
            elif gap <= sigmas * se:
                counts[INDETERMINATE] += 1
            else:
                counts[PASS] += 1
    return {"suite": "independence", "model": model, "seed": seed, "n_cov": n_cov,
            "n_draws": n_draws, "terms": [t.name for t in terms], "counts": counts,
            "escalations": escalations, "worst_z": worst, "violations": violations,
            "ok": counts[FAIL] == 0}


def psd_terms(H):
    """Both sides of the three pairwise inequalities for draws H (n, 8).

    With H_lo the Tx l -> output o coefficient:
    |H11 H22|^2 + |H12 H21|^2 >= 2 Re{H11 H22 H12* H21*} and its two
    cyclic variants over the output pairs (2, 3) and (3, 1).
    """
    h = {name: H[:, i] for i, name in enumerate(LINKS)}
    H11, H12, H13 = h["a11"], h["a12"], h["a13"]
    H21, H22, H23 = h["a21"], h["a22"], h["a23"]
    ab = np.abs
    lhs = [ab(H11 * H22) ** 2 + ab(H12 * H21) ** 2,
           ab(H12 * H23) ** 2 + ab(H13 * H22) ** 2,
           ab(H13 * H21) ** 2 + ab(H11 * H23) ** 2]
    rhs = [2 * np.real(H11 * H22 * np.conj(H12) * np.conj(H21)),
           2 * np.real(H12 * H23 * np.conj(H13) * np.conj(H22)),
           2 * np.real(H13 * H21 * np.conj(H11) * np.conj(H23))]
    return lhs, rhs


def verify_psd_inequality(n_draws=100_000, seed=0, slack=1e-12):
    """Exhaustive random check of the three inequalities (relative slack)."""
    if n_draws < 10_000:
        raise ValueError("need n_draws >= 10^4")
    H = unit_fading(RAYLEIGH, seed, n_draws)
    lhs, rhs = psd_terms(H)
    out = {"suite": "psd", "seed": seed, "n_draws": n_draws, "slack": slack,
           "inequalities": []}
    total = 0
    for k, (l, r) in enumerate(zip(lhs, rhs), start=1):
        margin = (l - r) / np.maximum(1.0, l)
        bad = int(np.count_nonzero(margin < -slack))
        total += bad
        out["inequalities"].append({"name": f"V{k}", "violations": bad,
                                    "min_relative_margin": float(margin.min())})
    out["violations"] = total
    out["ok"] = total == 0
    return out


def _single_exponential_check(n_draws, seed, sigmas):
    x = np.abs(unit_fading(RAYLEIGH, seed, n_draws)[:, 0]) ** 2  # Exp(1)
    samples = np.log2(1.0 + x)
    mc = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(n_draws))
    exact = mi.mean_log2_expsum([1.0])
    return {"name": "E log2(1 + X), X ~ Exp(1)", "exact": exact, "monte_carlo": mc,
            "std_error": se, "ok": abs(exact - mc) <= sigmas * se}


def crosscheck_closed_forms(model, params, n_draws=100_000, seed=0, sigmas=3.0,
                            abs_tol=1e-9):
    """Compare every deterministic term evaluator against Monte Carlo.

    Terms whose evaluator is itself Monte Carlo are skipped. Under phase
    fading many terms have zero sampling variance, so an absolute tolerance
    ``abs_tol`` backs up the ``sigmas`` band. As in the dominance check, a
    result outside the band is re-estimated once with ten times as many
    fresh draws before it counts as a failure.
    """
    if n_draws < 100_000:
        raise ValueError("need n_draws >= 10^5")
    model = fading_model(model)
    checks = []
    for t in mi.all_terms():
        ref = mi.evaluate(t, model, params, n=n_draws, seed=seed)
        if ref.method == mi.MONTE_CARLO:
            continue
        est = mi.mc_mi(t, model, params, n=n_draws, seed=seed)
        escalated = abs(ref.value - est.value) > sigmas * est.std_error + abs_tol
        if escalated:
            est = mi.mc_mi(t, model, params, n=10 * n_draws, seed=seed, start=n_draws)
        diff = ref.value - est.value
        ok = abs(diff) <= sigmas * est.std_error + abs_tol
        checks.append({"term": t.name, "method": ref.method, "value": ref.value,
                       "monte_carlo": est.value, "std_error": est.std_error,
                       "n_draws": est.n_samples, "diff": diff, "escalated": escalated,
                       "ok": ok})
    if model == RAYLEIGH:
        checks.append(_single_exponential_check(n_draws, seed, sigmas))
    failed = [c for c in checks if not c["ok"]]
    return {"suite": "crosscheck", "model": model, "seed": seed, "n_draws": n_draws,
            "checks": checks, "failures": len(failed), "ok": not failed}


def random_scenario(rng, att_range=(1e-2, 2.0), power_range=(0.1, 100.0)):
    """Log-uniform attenuations and powers."""
    la, lp = np.log(att_range), np.log(power_range)
    a = np.exp(rng.uniform(la[0], la[1], size=8))
    p = np.exp(rng.uniform(lp[0], lp[1], size=3))
    return NetworkParams(**dict(zip(LINKS, a)), P1=p[0], P2=p[1], P3=p[2])


def verify_regime_nesting(n_scenarios=1000, seed=0, model=PHASE,
                          settings=rg.DEFAULT_SETTINGS):
    """Random-scenario check of the implications between regime conditions.

    Checked: VSI => SI (full relay feedback), partial-feedback VSI => full
    VSI, no-feedback VSI => full VSI, and SI region inside the VSI rectangle.
    """
    if n_scenarios < 100:
        raise ValueError("need n_scenarios >= 100")
    model = fading_model(model)
    rng = np.random.default_rng([seed, 0x4E57])
    names = ("VSI=>SI", "PartialVSI=>FullVSI", "NoFeedbackVSI=>FullVSI",
             "SIregion<=VSIrectangle")
    counts = {n: {"antecedent": 0, "violations": 0} for n in names}
    examples = []
    for i in range(n_scenarios):
        p = random_scenario(rng)
        full_vsi = rg.check_vsi(rg.FULL_TO_RELAY, model, p, settings).overall
        full_si = rg.check_si(rg.FULL_TO_RELAY, model, p, settings).overall
        part_vsi = rg.check_vsi(rg.PARTIAL_RX1, model, p, settings).overall
        nofb_vsi = rg.check_vsi(rg.NO_FEEDBACK, model, p, settings).overall
        si = regions.build_region(rg.FULL_TO_RELAY, rg.SI_NOT_VSI, model, p, force=True,
                                  settings=settings)
        rect = regions.build_region(rg.FULL_TO_RELAY, rg.VSI, model, p, force=True,
                                    settings=settings)
        results = ((full_vsi, full_si), (part_vsi, full_vsi), (nofb_vsi, full_vsi),
                   (True, rect.contains_region(si)))
        for name, (ante, cons) in zip(names, results):
            if ante:
                counts[name]["antecedent"] += 1
                if not cons:
                    counts[name]["violations"] += 1
                    if len(examples) < 10:
                        examples.append({"check": name, "scenario": i,
                                         "params": p.attenuations() | {
                                             "P1": p.P1, "P2": p.P2, "P3": p.P3}})
    total = sum(c["violations"] for c in counts.values())
    return {"suite": "nesting", "model": model, "seed": seed, "n_scenarios": n_scenarios,
            "checks": counts, "violations": total, "counterexamples": examples,
            "ok": total == 0}
