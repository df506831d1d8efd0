"""Command-line interface.

Exit status: 0 on success, 1 when a reproduction check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from . import reports
from .errors import OorError
from .gf2 import DegreeRange, LfsrSpec, keystream, min_degree, random_primitive, random_seed
from .montecarlo import MonteCarloConfig, compare, run_monte_carlo
from .reproduce import WIRETAP_LINKS, dataset_path, reproduce
from .threat import ThreatConfig, parse_link
from .topology import Topology, build_ensemble, load_topology_file

log = logging.getLogger("oor")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_SEED = 2016


class InputError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _topology(args) -> Topology:
    path = Path(args.topology) if args.topology else dataset_path()
    if not path.is_file():
        raise InputError(f"topology file not found: {path}")
    return load_topology_file(path)


def _links(text: str) -> list:
    return [parse_link(x) for x in text.replace(",", " ").split()]


def cmd_analyze_availability(args) -> int:
    t = _topology(args)
    ens = build_ensemble(t, args.ensemble)
    _emit(reports.to_csv(reports.AVAILABILITY_HEADER, reports.availability_rows(ens)), args.out)
    return EXIT_OK


def cmd_analyze_threat(args) -> int:
    t = _topology(args)
    ens = build_ensemble(t, args.ensemble)
    rows = []
    phis = reports.frange(args.phi_sweep) if args.phi_sweep else (
        [args.phi] if args.phi is not None else [i / 20 for i in range(11)]
    )
    for phi, p, eq in reports.phi_sweep_rows(ens, phis, args.message_bits, args.eta_max):
        rows.append(("phi", phi, p, eq))
    links = _links(args.wiretap_links) if args.wiretap_links else [parse_link(l) for l in WIRETAP_LINKS]
    ws = reports.irange(args.w_sweep) if args.w_sweep else list(range(1, len(links) + 1))
    for w, p, eq in reports.w_sweep_rows(ens, links, ws, args.message_bits, args.eta_max, t):
        rows.append(("w", w, p, eq))
    _emit(reports.to_csv(("sweep", "x", "probability", "mean_equivocation"), rows), args.out)
    return EXIT_OK


def cmd_analyze_equivocation(args) -> int:
    eta_maxes = reports.irange(args.eta_max_range or str(args.eta_max))
    etas = reports.irange(args.eta_sweep) if args.eta_sweep else list(range(max(eta_maxes) + 1))
    rows = reports.equivocation_rows(args.message_bits, etas, eta_maxes)
    _emit(reports.to_csv(reports.EQUIVOCATION_HEADER, rows), args.out)
    return EXIT_OK


def _experiment(args) -> dict:
    cfg: dict = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise InputError(f"config file not found: {path}")
        try:
            cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        if "topology" in cfg and not args.topology:
            args.topology = str((path.parent / cfg["topology"]).resolve())
    for key in ("ensemble", "eta_max", "trials", "seed"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    threat = dict(cfg.get("threat", {}))
    if args.phi is not None:
        threat = {"mode": "probabilistic", "phi": args.phi}
    elif args.wiretap_links:
        threat = {"mode": "fixed_set", "links": args.wiretap_links.replace(",", " ").split()}
    cfg["threat"] = threat or {"mode": "probabilistic", "phi": 0.3}
    cfg.setdefault("trials", 100_000)
    cfg.setdefault("seed", DEFAULT_SEED)
    cfg.setdefault("eta_max", 2)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _experiment(args)
    t = _topology(args)
    ens = build_ensemble(t, cfg.get("ensemble"))
    th = cfg["threat"]
    if th.get("mode") == "fixed_set":
        links = [parse_link(l) if isinstance(l, str) else tuple(l) for l in th.get("links", [])]
        unknown = [l for l in links if not t.has_link(l)]
        if unknown:
            raise InputError(f"unknown wiretap link(s): {unknown}")
        threat = ThreatConfig.fixed(links)
    else:
        threat = ThreatConfig.probabilistic(float(th.get("phi", 0.0)))
    trials = int(cfg["trials"])
    if trials < 1:
        raise InputError("trials must be >= 1")
    mc = MonteCarloConfig(
        ens, threat, trials, int(cfg["seed"]), int(cfg["eta_max"]), args.selection
    )
    result = run_monte_carlo(mc, keep_trace=bool(args.trace))
    stats, trace = result if args.trace else (result, None)
    rows = []
    for c in compare(mc, stats):
        lo, hi = c.observed.wilson
        rows.append((
            c.quantity, stats.trials, c.observed.hits, c.observed.n, c.observed.estimate,
            c.observed.ci95_half_width, lo, hi, c.closed_form, c.in_ci,
        ))
    header = ("quantity", "trials", "hits", "n", "estimate", "ci95_half_width",
              "wilson_lo", "wilson_hi", "closed_form", "in_ci")
    _emit(reports.to_csv(header, rows), args.out)
    if trace is not None:
        blocked, choice, hit = trace
        Path(args.trace).write_text(reports.to_csv(
            ("trial", "blocked", "path_index", "wiretapped"),
            ((i, bool(b), None if b else int(c) + 1, bool(h)) for i, (b, c, h) in enumerate(zip(blocked, choice, hit))),
        ))
    return EXIT_OK


def cmd_keygen(args) -> int:
    rng = random.Random(args.seed)
    L = args.message_bits
    g_min = args.g_min or min_degree(L)
    degrees = DegreeRange(g_min, args.g_max or g_min)
    if not degrees.guards(L):
        raise InputError(f"g_min={g_min} gives period {2**g_min - 1}, not longer than {L} bits")
    rows = []
    for i in range(args.count):
        g = rng.randint(degrees.g_min, degrees.g_max)
        spec = LfsrSpec(random_primitive(g, rng), random_seed(g, rng))
        key = keystream(spec, L)
        rows.append((i, g, spec.polynomial.to_hex(), spec.seed.to_hex(), L, key.to_hex()))
    _emit(reports.to_csv(("index", "degree", "polynomial", "seed", "bits", "key"), rows), args.out)
    return EXIT_OK


def cmd_reproduce_paper(args) -> int:
    t = _topology(args)
    out = Path(args.out or "reproduction")
    checks = reproduce(
        out, t, trials=args.trials or 100_000, seed=args.seed if args.seed is not None else DEFAULT_SEED,
        message_bits=args.message_bits, circuits=args.circuits,
    )
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    print(f"tables written to {out}/")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oor", description="Optical onion routing analysis and simulation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, topo=True):
        if topo:
            sp.add_argument("--topology", metavar="PATH", help="topology JSON (default: bundled 24-node network)")
            sp.add_argument("--ensemble", metavar="NAME", help="ensemble name or SRC-DST (default: first)")
        sp.add_argument("--out", metavar="PATH", help="output file (default: stdout)")

    sp = sub.add_parser("analyze-availability", help="path-count distribution, blocking, selection")
    common(sp)
    sp.set_defaults(fn=cmd_analyze_availability)

    sp = sub.add_parser("analyze-threat", help="wiretap probability sweeps over phi and w")
    common(sp)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--phi-sweep", metavar="A:B:STEP")
    sp.add_argument("--wiretap-links", metavar="LIST", help="e.g. '3-7,8-9'")
    sp.add_argument("--w-sweep", metavar="A:B")
    sp.add_argument("--eta-max", type=int, default=2)
    sp.add_argument("--message-bits", type=int, default=1024)
    sp.set_defaults(fn=cmd_analyze_threat)

    sp = sub.add_parser("analyze-equivocation", help="entropy and attacker equivocation grid")
    common(sp, topo=False)
    sp.add_argument("--message-bits", type=int, default=1024)
    sp.add_argument("--eta-max", type=int, default=9)
    sp.add_argument("--eta-max-range", metavar="A:B")
    sp.add_argument("--eta-sweep", metavar="A:B")
    sp.set_defaults(fn=cmd_analyze_equivocation)

    sp = sub.add_parser("simulate", help="Monte Carlo check against the closed forms")
    common(sp)
    sp.add_argument("--config", metavar="PATH", help="experiment JSON")
    sp.add_argument("--phi", type=float)
    sp.add_argument("--wiretap-links", metavar="LIST")
    sp.add_argument("--eta-max", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--selection", choices=("closed_form", "uniform"), default="closed_form")
    sp.add_argument("--trace", metavar="PATH", help="write per-trial records here")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("keygen", help="draw LFSR session keys")
    common(sp, topo=False)
    sp.add_argument("--message-bits", type=int, default=128)
    sp.add_argument("--g-min", type=int)
    sp.add_argument("--g-max", type=int)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_keygen)

    sp = sub.add_parser("reproduce-paper", help="regenerate figure tables and run all checks")
    sp.add_argument("--topology", metavar="PATH")
    sp.add_argument("--out", metavar="DIR", default="reproduction")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--message-bits", type=int, default=1024)
    sp.add_argument("--circuits", type=int, default=1000)
    sp.set_defaults(fn=cmd_reproduce_paper)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.fn(args)
    except (InputError, OorError, ValueError, KeyError, OSError) as exc:
        print(f"oor: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
