"""Evaluation on the bundled 24-node network: figure tables plus pass/fail checks."""

from __future__ import annotations

import math
import os
import random
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

from . import reports
from .availability import availability_report
from .bits import Bits
from .circuit import plan_circuit, transmit
from .crypto import SecrecyParams, SecrecyVerdict, perfect_secrecy_check
from .equivocation import SecrecyScenario, attacker_equivocation, secrecy_report
from .errors import Blocked
from .gf2 import DegreeRange, LfsrSpec, count_primitive, enumerate_primitive, keystream
from .montecarlo import MonteCarloConfig, compare, run_monte_carlo
from .threat import ThreatConfig, fixed_set_sweep, parse_link, wiretapped_transmission_prob
from .topology import PathEnsemble, Topology, build_ensemble, load_topology_file

DATASET = "oor24.json"
PUBLISHED_AVAILABILITY = (0.9, 0.85, 0.8, 0.75, 0.75, 0.7, 0.65, 0.6, 0.55, 0.55, 0.5, 0.5)
PUBLISHED_PATH_COUNT = 12
WIRETAP_LINKS = ("3-7", "8-9", "17-18", "13-11")
FIG3_ETA_MAX = 9
FIG45_ETA_MAX = 2


def dataset_path() -> Path:
    env = os.environ.get("OOR_DATA_DIR")
    if env:
        return Path(env) / DATASET
    return Path(str(resources.files("oor") / "data" / DATASET))


def load_bundled() -> Topology:
    return load_topology_file(dataset_path())


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def brute_force_distribution(p: tuple[float, ...]) -> list[float]:
    """P(exactly j paths up) by enumerating every up/down outcome."""
    n = len(p)
    buckets: list[list[float]] = [[] for _ in range(n + 1)]
    for mask in range(1 << n):
        prob = 1.0
        for i, x in enumerate(p):
            prob *= x if mask >> i & 1 else 1.0 - x
        buckets[mask.bit_count()].append(prob)
    return [math.fsum(b) for b in buckets]


def lfsr_period(spec: LfsrSpec) -> int:
    """Least shift under which the keystream repeats, read off two periods."""
    n = 2**spec.polynomial.degree - 1
    bits = keystream(spec, 2 * n).value
    mask = (1 << n) - 1
    window = bits & mask
    return next(d for d in range(1, n + 1) if (bits >> d) & mask == window)


def _checks(topology: Topology, ensemble: PathEnsemble, trials: int, seed: int,
            circuits: int) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    def path_count():
        return len(ensemble) == PUBLISHED_PATH_COUNT, f"{len(ensemble)} wavelength paths"

    def availability():
        got = ensemble.availabilities
        ok = got == PUBLISHED_AVAILABILITY and list(got) == sorted(got, reverse=True)
        return ok, "vector " + ("matches" if ok else f"differs: {list(got)}")

    def normalization():
        rep = availability_report(ensemble)
        brute = brute_force_distribution(ensemble.availabilities)
        d1 = abs(math.fsum(rep.distribution) - 1.0)
        d2 = abs(rep.selection_mass - (1.0 - rep.blocking))
        d3 = max(abs(a - b) for a, b in zip(rep.distribution, brute))
        return d1 <= 1e-9 and d2 <= 1e-9 and d3 <= 1e-12, f"sum_j={d1:.1e} sum_alpha={d2:.1e} brute={d3:.1e}"

    def monte_carlo():
        bad = []
        for phi in (0.1, 0.3, 0.5):
            cfg = MonteCarloConfig(ensemble, ThreatConfig.probabilistic(phi), trials, seed)
            for c in compare(cfg, run_monte_carlo(cfg)):
                if not c.in_ci:
                    bad.append(f"{c.quantity}@phi={phi}")
        return not bad, "all in CI" if not bad else "outside CI: " + ", ".join(bad)

    def threat():
        phis = [i / 20 for i in range(21)]
        vals = [wiretapped_transmission_prob(ensemble, phi) for phi in phis]
        mono = all(a <= b for a, b in zip(vals, vals[1:]))
        half = wiretapped_transmission_prob(ensemble, 0.5)
        links = [parse_link(l) for l in WIRETAP_LINKS]
        ws = [fixed_set_sweep(ensemble, links, w, topology) for w in range(1, 5)]
        inc = all(a < b for a, b in zip(ws, ws[1:]))
        return mono and half > 0.95 and inc, (
            f"monotone={mono} P_phi_w(0.5)={half:.4f} (>0.95 required) "
            f"P_w(1..4)={[round(x, 4) for x in ws]} increasing={inc}"
        )

    def equivocation():
        r9 = secrecy_report(SecrecyScenario(1024, 9, FIG3_ETA_MAX))
        r0 = secrecy_report(SecrecyScenario(1024, 0, FIG3_ETA_MAX))
        ratios = [secrecy_report(SecrecyScenario(1024, e, FIG3_ETA_MAX)).normalized_by_he for e in range(10)]
        dec = all(a > b for a, b in zip(ratios, ratios[1:]))
        lemma = all(
            attacker_equivocation(L, em, "exact") >= L for L in range(4, 17) for em in range(10)
        )
        ok = abs(r9.normalized_by_he / (65 / 11) - 1) <= 0.02 and 30 <= r0.normalized_by_he <= 36
        return ok and dec and lemma, (
            f"eta=9: {r9.normalized_by_he:.4f} eta=0: {r0.normalized_by_he:.4f} "
            f"decreasing={dec} lemma1={lemma}"
        )

    def lfsr():
        counts = all(len(enumerate_primitive(g)) == count_primitive(g) for g in range(1, 13))
        periods = True
        for g in range(1, 11):
            for poly in enumerate_primitive(g):
                seed = Bits(1, g)
                periods &= lfsr_period(LfsrSpec(poly, seed)) == 2**g - 1
        return counts and periods, f"counts={counts} periods={periods}"

    def onion():
        rng = random.Random(seed)
        delivered = changed = 0
        for _ in range(circuits):
            m = Bits.random(128, rng)
            try:
                plan = plan_circuit(ensemble, FIG3_ETA_MAX, rng, 128, avoid=m)
            except Blocked:
                continue
            out, trace = transmit(plan, m)
            delivered += out == m
            changed += all(
                trace[i].payload != trace[i + 1].payload
                for i, rec in enumerate(trace[:-1]) if rec.link[1] in plan.anonymizers
            )
        return delivered == changed == circuits, f"{delivered}/{circuits} delivered, {changed} hop-changing"

    def secrecy_gate():
        mismatches = 0
        for L in range(1, 201):
            for g0 in range(3, 17):
                for g1 in range(g0, 17):
                    got = perfect_secrecy_check(SecrecyParams(L, DegreeRange(g0, g1)))
                    h1 = sum(math.log2(count_primitive(g) * (2**g - 1)) for g in range(g0, g1 + 1))
                    if L > 2**g0 - 1:
                        want = SecrecyVerdict.FAILS_LENGTH
                    elif h1 < L:
                        want = SecrecyVerdict.FAILS_ENTROPY
                    else:
                        want = SecrecyVerdict.HOLDS
                    mismatches += got is not want
        return mismatches == 0, f"{mismatches} mismatches"

    return [
        ("path_count", path_count),
        ("availability_vector", availability),
        ("normalization", normalization),
        ("monte_carlo_calibration", monte_carlo),
        ("threat_trends", threat),
        ("equivocation_fig3", equivocation),
        ("lfsr_key_space", lfsr),
        ("onion_end_to_end", onion),
        ("secrecy_gate", secrecy_gate),
    ]


def reproduce(
    out_dir: Path,
    topology: Topology,
    *,
    trials: int = 100_000,
    seed: int = 2016,
    message_bits: int = 1024,
    circuits: int = 1000,
) -> list[Check]:
    out_dir.mkdir(parents=True, exist_ok=True)
    ensemble = build_ensemble(topology)
    links = [parse_link(l) for l in WIRETAP_LINKS]

    (out_dir / "availability.csv").write_text(
        reports.to_csv(reports.AVAILABILITY_HEADER, reports.availability_rows(ensemble))
    )
    (out_dir / "fig3.csv").write_text(
        reports.to_csv(
            reports.EQUIVOCATION_HEADER,
            reports.equivocation_rows(message_bits, range(10), range(FIG3_ETA_MAX + 1)),
        )
    )
    phis = [i / 20 for i in range(11)]
    (out_dir / "fig4.csv").write_text(
        reports.to_csv(
            reports.FIG4_HEADER,
            reports.phi_sweep_rows(ensemble, phis, message_bits, FIG45_ETA_MAX),
        )
    )
    (out_dir / "fig5.csv").write_text(
        reports.to_csv(
            reports.FIG5_HEADER,
            reports.w_sweep_rows(ensemble, links, range(1, 5), message_bits, FIG45_ETA_MAX, topology),
        )
    )

    results = []
    for name, fn in _checks(topology, ensemble, trials, seed, circuits):
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(Check(name, bool(passed), f"{detail} [{time.perf_counter() - t0:.2f}s]"))
    (out_dir / "summary.csv").write_text(
        reports.to_csv(("check", "passed", "detail"), [(c.name, c.passed, c.detail) for c in results])
    )
    return results

