"""CSV tables for the analyses. Floats are written with ``repr`` so output
bytes are stable across runs."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence

from .availability import availability_report
from .equivocation import SecrecyScenario, mean_equivocation, secrecy_report
from .errors import ScenarioTooSmallError
from .threat import (
    fixed_set_sweep,
    wiretapped_transmission_prob,
)
from .topology import Link, PathEnsemble, Topology

Row = Sequence[object]


def _cell(x: object) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def to_csv(header: Sequence[str], rows: Iterable[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(x) for x in r])
    return buf.getvalue()


AVAILABILITY_HEADER = ("table", "index", "path", "hops", "wavelength", "value")


def availability_rows(ensemble: PathEnsemble) -> list[Row]:
    rep = availability_report(ensemble)
    rows: list[Row] = [("prob_exactly", j, None, None, None, v) for j, v in enumerate(rep.distribution)]
    rows.append(("blocking", None, None, None, None, rep.blocking))
    selection = rep.selection or (None,) * len(ensemble)
    for a, (path, v) in enumerate(zip(ensemble, selection), start=1):
        rows.append(("selection", a, "-".join(map(str, path.nodes)), path.hops, path.wavelength, v))
    return rows


def frange(spec: str) -> list[float]:
    """Parse ``A:B:STEP`` into an inclusive float grid (or a single value)."""
    parts = [float(x) for x in spec.split(":")]
    if len(parts) == 1:
        return parts
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise ValueError(f"bad sweep {spec!r}, expected A:B:STEP")
    a, b, step = parts
    n = int(round((b - a) / step))
    return [round(a + i * step, 12) for i in range(n + 1) if a + i * step <= b + 1e-12]


def irange(spec: str) -> list[int]:
    """Parse ``N`` or ``A:B`` into an inclusive integer range."""
    parts = [int(x) for x in spec.split(":")]
    if len(parts) == 1:
        return parts
    if len(parts) != 2 or parts[1] < parts[0]:
        raise ValueError(f"bad range {spec!r}, expected A:B")
    return list(range(parts[0], parts[1] + 1))


FIG4_HEADER = ("phi", "P_phi_w", "mean_equivocation")
FIG5_HEADER = ("w", "P_w", "mean_equivocation")


def phi_sweep_rows(
    ensemble: PathEnsemble, phis: Sequence[float], message_bits: int, eta_max: int
) -> list[Row]:
    rows = []
    for phi in phis:
        p = wiretapped_transmission_prob(ensemble, phi)
        rows.append((phi, p, mean_equivocation(p, message_bits, eta_max)))
    return rows


def w_sweep_rows(
    ensemble: PathEnsemble,
    candidates: Sequence[Link],
    ws: Sequence[int],
    message_bits: int,
    eta_max: int,
    topology: Topology | None = None,
) -> list[Row]:
    rows = []
    for w in ws:
        p = fixed_set_sweep(ensemble, candidates, w, topology)
        rows.append((w, p, mean_equivocation(p, message_bits, eta_max)))
    return rows


EQUIVOCATION_HEADER = (
    "L", "eta", "eta_max", "H_plain", "H_encrypted", "H_attacker",
    "normalized_by_He", "normalized_by_H", "lemma1_holds", "error",
)


def equivocation_rows(L: int, etas: Sequence[int], eta_maxes: Sequence[int]) -> list[Row]:
    rows: list[Row] = []
    for eta_max in eta_maxes:
        for eta in etas:
            if eta > eta_max:
                continue
            try:
                r = secrecy_report(SecrecyScenario(L, eta, eta_max))
            except ScenarioTooSmallError as exc:
                rows.append((L, eta, eta_max, None, None, None, None, None, None, f"scenario-too-small: {exc}"))
                continue
            rows.append((
                L, eta, eta_max, r.h_plain, r.h_encrypted, r.h_attacker,
                r.normalized_by_he, r.normalized_by_h, r.lemma1_holds, None,
            ))
    return rows
