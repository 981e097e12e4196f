"""Batch sweeps: vibrational maps, polariton scans, size scans, manifests.

Grid points are independent; they run on a process pool when ``workers > 1``.
Results are gathered, sorted by grid index and written serially with fixed
float formatting, so the CSV output is byte-identical for any worker count.
A failing point is recorded in the manifest and leaves NaN in its row rather
than aborting the sweep (decomposition-only scans abort instead, identifying
the offending point).
"""

from __future__ import annotations

import concurrent.futures
import json
import logging
import math
import time
from dataclasses import dataclass

from .config import FullConfig
from .liouville import LiouvilleProblem
from .polaritons import decompose, sweep_decomposition, write_decomposition_csv
from .ratenet import build_rate_network, solve_network

log = logging.getLogger("polarxfer")

# Columns of the size-scan rate table; entries missing for a given system
# (e.g. dark levels at N = 1) are NaN.
RATE_COLUMNS = (
    "rate_up_to_mp", "rate_up_to_lp", "rate_mp_to_lp",
    "rate_up_to_dark_donor", "rate_up_to_dark_acceptor", "rate_mp_to_dark_acceptor",
    "rate_dark_donor_to_mp", "rate_dark_donor_to_lp", "rate_dark_acceptor_to_lp",
)
_RATE_EDGES = {
    "rate_up_to_mp": ("up", "mp"), "rate_up_to_lp": ("up", "lp"),
    "rate_mp_to_lp": ("mp", "lp"),
    "rate_up_to_dark_donor": ("up", "dark_donor"),
    "rate_up_to_dark_acceptor": ("up", "dark_acceptor"),
    "rate_mp_to_dark_acceptor": ("mp", "dark_acceptor"),
    "rate_dark_donor_to_mp": ("dark_donor", "mp"),
    "rate_dark_donor_to_lp": ("dark_donor", "lp"),
    "rate_dark_acceptor_to_lp": ("dark_acceptor", "lp"),
}


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def transfer_point(cfg: FullConfig, omega_vd: float | None = None,
                   omega_va: float | None = None, n_molecules: int | None = None,
                   engine: str | None = None) -> dict:
    """Solve one parameter point with the configured engine(s).

    Returns a dict with ``t_redfield`` and/or ``t_rate`` plus the per-engine
    reports.  ``n_molecules`` overrides both species counts (size scans).
    """
    engine = engine or cfg.sweep.engine
    overrides = {}
    if n_molecules is not None:
        overrides = {"n_donors": n_molecules, "n_acceptors": n_molecules}
    ensemble, cavity = cfg.system.make(**overrides)
    decomposition = decompose(ensemble, cavity)
    baths = cfg.baths.resolve(decomposition, omega_vd=omega_vd, omega_va=omega_va)

    out: dict = {
        "omega_vd_ev": baths.donor.omega_v,
        "omega_va_ev": baths.acceptor.omega_v,
    }
    if engine in ("redfield", "both"):
        if ensemble.dimension > cfg.sweep.redfield_dim_cap:
            raise ValueError(
                f"Redfield engine requested for dimension {ensemble.dimension} "
                f"beyond cap {cfg.sweep.redfield_dim_cap}")
        problem = LiouvilleProblem.build(ensemble, cavity, baths, cfg.drive.resolve(decomposition))
        state = problem.solve()
        out["t_redfield"] = state.transfer_efficiency
        out["redfield_report"] = state.to_report(decomposition)
    if engine in ("rate", "both"):
        network = build_rate_network(decomposition, baths, kappa=cfg.system.kappa,
                                     gamma_donor=cfg.system.gamma_rad,
                                     gamma_acceptor=cfg.system.gamma_rad)
        solution = solve_network(network)
        out["t_rate"] = solution.transfer_efficiency
        out["rate_report"] = solution.to_report(network)
        out["rates"] = {column: network.rates.get(edge, math.nan)
                        for column, edge in _RATE_EDGES.items()}
    return out


def _map_worker(args):
    cfg, index, coords = args
    try:
        result = transfer_point(cfg, **coords)
        return index, "ok", result, ""
    except Exception as exc:  # fail-soft: record, keep sweeping
        return index, "error", None, f"{type(exc).__name__}: {exc}"


def _run_points(cfg: FullConfig, tasks: list[tuple]) -> list[tuple]:
    """Evaluate (index, coords) tasks, possibly on a process pool; sorted results."""
    args = [(cfg, index, coords) for index, coords in tasks]
    if cfg.sweep.workers == 1 or len(tasks) <= 1:
        results = [_map_worker(a) for a in args]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.sweep.workers) as pool:
            results = list(pool.map(_map_worker, args, chunksize=4))
    for index, status, _, message in results:
        log.info("point %s: %s%s", index, status, f" ({message})" if message else "")
    return sorted(results, key=lambda r: r[0])


def _write_manifest(path, cfg: FullConfig, kind: str, points: list[dict],
                    wall_clock: float, extra: dict | None = None) -> None:
    from polarxfer import __version__

    manifest = {
        "tool": "polarxfer",
        "version": __version__,
        "kind": kind,
        "config": cfg.to_dict(),
        "wall_clock_s": wall_clock,
        "n_points": len(points),
        "n_failed": sum(p["status"] != "ok" for p in points),
        "points": points,
    }
    if extra:
        manifest.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class SweepResult:
    csv_path: str
    manifest_path: str
    n_points: int
    n_failed: int


def run_vibrational_map(cfg: FullConfig, output: str | None = None) -> SweepResult:
    """Transfer efficiency over the (omega_vd, omega_va) grid, row-major CSV."""
    t0 = time.monotonic()
    grid_d = cfg.sweep.grids["omega_vd"]
    grid_a = cfg.sweep.grids["omega_va"]
    tasks = []
    for i, wvd in enumerate(grid_d):
        for j, wva in enumerate(grid_a):
            tasks.append((i * len(grid_a) + j, {"omega_vd": wvd, "omega_va": wva}))
    results = _run_points(cfg, tasks)

    columns = ["omega_vd_ev", "omega_va_ev"]
    if cfg.sweep.engine in ("redfield", "both"):
        columns.append("t_redfield")
    if cfg.sweep.engine in ("rate", "both"):
        columns.append("t_rate")

    base = output or cfg.sweep.output
    csv_path, manifest_path = f"{base}.csv", f"{base}.manifest.json"
    points = []
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for (index, coords), (_, status, result, message) in zip(tasks, results):
            row = {"omega_vd_ev": coords["omega_vd"], "omega_va_ev": coords["omega_va"]}
            if status == "ok":
                row.update({k: result.get(k, math.nan) for k in ("t_redfield", "t_rate")})
            else:
                row.update({"t_redfield": math.nan, "t_rate": math.nan})
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")
            points.append({"index": index, "coords": coords, "status": status,
                           "message": message})

    ensemble, cavity = cfg.system.make()
    gaps = decompose(ensemble, cavity).resonance_gaps()
    _write_manifest(manifest_path, cfg, "vibrational_map", points,
                    time.monotonic() - t0, extra={"resonance_gaps_ev": gaps})
    return SweepResult(csv_path, manifest_path, len(points),
                       sum(p["status"] != "ok" for p in points))


def run_size_scan(cfg: FullConfig, output: str | None = None) -> SweepResult:
    """Rates and efficiencies versus molecule number (N donors and N acceptors)."""
    t0 = time.monotonic()
    sizes = cfg.sweep.grids["sizes"]
    tasks = [(k, {"n_molecules": n}) for k, n in enumerate(sizes)]
    results = _run_points(cfg, tasks)

    base = output or cfg.sweep.output
    csv_path, manifest_path = f"{base}.csv", f"{base}.manifest.json"
    columns = ["n"] + list(RATE_COLUMNS) + ["t_rate", "t_redfield"]
    points = []
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for (index, coords), (_, status, result, message) in zip(tasks, results):
            n = sizes[index]
            values = {c: math.nan for c in columns}
            values["n"] = n
            if status == "ok":
                values.update(result.get("rates", {}))
                values["t_rate"] = result.get("t_rate", math.nan)
                values["t_redfield"] = result.get("t_redfield", math.nan)
            fh.write(",".join(_fmt(values[c]) for c in columns) + "\n")
            points.append({"index": index, "coords": {"n": n}, "status": status,
                           "message": message})
    _write_manifest(manifest_path, cfg, "size_scan", points, time.monotonic() - t0)
    return SweepResult(csv_path, manifest_path, len(points),
                       sum(p["status"] != "ok" for p in points))


def run_polariton_scan(cfg: FullConfig, axis: str, output: str | None = None) -> SweepResult:
    """Polariton energies and Hopfield weights along a Rabi or cavity-frequency grid."""
    t0 = time.monotonic()
    grid = cfg.sweep.grids[axis]
    fixed = dict(
        n_donors=cfg.system.n_donors, n_acceptors=cfg.system.n_acceptors,
        omega_d=cfg.system.omega_d, omega_a=cfg.system.omega_a,
        omega_c=cfg.system.omega_c, rabi=cfg.system.rabi,
        kappa=cfg.system.kappa, gamma_rad=cfg.system.gamma_rad,
        layout=cfg.system.layout, profile=cfg.system.profile,
        length=cfg.system.length, wall_width=cfg.system.wall,
    )
    fixed.pop("rabi" if axis == "rabi" else "omega_c")
    rows = sweep_decomposition(axis, grid, fixed)

    base = output or cfg.sweep.output
    csv_path, manifest_path = f"{base}.csv", f"{base}.manifest.json"
    write_decomposition_csv(csv_path, rows)
    points = [{"index": i, "coords": {axis: g}, "status": "ok", "message": ""}
              for i, g in enumerate(grid)]
    _write_manifest(manifest_path, cfg, f"{axis}_scan", points, time.monotonic() - t0)
    return SweepResult(csv_path, manifest_path, len(points), 0)


def run_single_point(cfg: FullConfig, output: str | None = None) -> tuple[SweepResult, dict]:
    """One solve at the resolved configuration; CSV row, manifest and JSON report."""
    t0 = time.monotonic()
    base = output or cfg.sweep.output
    csv_path, manifest_path = f"{base}.csv", f"{base}.manifest.json"
    index, status, result, message = _map_worker((cfg, 0, {}))

    columns = ["omega_vd_ev", "omega_va_ev"]
    if cfg.sweep.engine in ("redfield", "both"):
        columns.append("t_redfield")
    if cfg.sweep.engine in ("rate", "both"):
        columns.append("t_rate")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        if status == "ok":
            fh.write(",".join(_fmt(result.get(c, math.nan)) for c in columns) + "\n")
        else:
            fh.write(",".join(_fmt(math.nan) for _ in columns) + "\n")

    report = point_report(result) if status == "ok" else {"error": message}
    with open(f"{base}.report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    points = [{"index": 0, "coords": {}, "status": status, "message": message}]
    _write_manifest(manifest_path, cfg, "single_point", points, time.monotonic() - t0)
    return SweepResult(csv_path, manifest_path, 1, int(status != "ok")), report


def point_report(result: dict) -> dict:
    """JSON-ready report of one solved point (either or both engines)."""
    report = {
        "omega_vd_ev": result["omega_vd_ev"],
        "omega_va_ev": result["omega_va_ev"],
    }
    if "redfield_report" in result:
        report["redfield"] = result["redfield_report"]
    if "rate_report" in result:
        report["rate"] = result["rate_report"]
    if "t_redfield" in result and "t_rate" in result:
        t_r, t_n = result["t_redfield"], result["t_rate"]
        if t_r is not None and t_n is not None:
            report["engine_comparison"] = {
                "t_redfield": t_r, "t_rate": t_n, "abs_difference": abs(t_r - t_n),
            }
    return report


def run_sweep(cfg: FullConfig, output: str | None = None) -> SweepResult:
    """Dispatch on the configured sweep kind."""
    kind = cfg.sweep.kind
    if kind == "vibrational_map":
        return run_vibrational_map(cfg, output)
    if kind == "size_scan":
        return run_size_scan(cfg, output)
    if kind == "rabi_scan":
        return run_polariton_scan(cfg, "rabi", output)
    if kind == "cavity_scan":
        return run_polariton_scan(cfg, "cavity", output)
    result, _ = run_single_point(cfg, output)
    return result
