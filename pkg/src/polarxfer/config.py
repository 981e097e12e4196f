"""TOML run configuration: defaults, validation and resolution.

Energies are eV throughout (keys carry an ``_ev`` suffix), lengths nm.  Bath
center frequencies accept "auto" (lock the donor bath to the UP-donor gap and
the acceptor bath to the MP-acceptor gap); the drive frequency accepts
"auto_up" (pump at the upper polariton).  Grids are either explicit ascending
arrays or inline tables {start=..., stop=..., points=...}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .baths import BathSet, SpectralDensityParams
from .liouville import DriveParams
from .polaritons import PolaritonDecomposition
from .system import Species, make_system


class ConfigError(ValueError):
    """Malformed or out-of-range run configuration."""


SWEEP_KINDS = ("single_point", "vibrational_map", "rabi_scan", "cavity_scan", "size_scan")
ENGINES = ("redfield", "rate", "both")

_DEFAULTS: dict[str, dict[str, Any]] = {
    "system": {
        "n_donors": 16, "n_acceptors": 16,
        "omega_d_ev": 2.1, "omega_a_ev": 1.88, "omega_c_ev": 2.1,
        "rabi_ev": 0.16, "kappa_ev": 0.01, "gamma_rad_ev": 1.3e-6,
        "layout": "separated", "profile": "second",
        "length_nm": 100.0, "wall_nm": 10.0,
    },
    "baths": {
        "gamma_phi_ev": 0.013, "xi_ev": 0.01,
        "omega_vd_ev": "auto", "omega_va_ev": "auto",
    },
    "drive": {
        "omega_p_ev": "auto_up", "amplitude_ev": 1e-4,
    },
    "sweep": {
        "kind": "single_point", "engine": "redfield",
        "workers": 1, "output": "xfer_run", "redfield_dim_cap": 66,
        "omega_vd_grid": {"start": 0.02, "stop": 0.59, "points": 39},
        "omega_va_grid": {"start": 0.02, "stop": 0.59, "points": 39},
        "rabi_grid": {"start": 0.01, "stop": 0.30, "points": 30},
        "cavity_grid": {"start": 1.70, "stop": 2.50, "points": 33},
        "sizes": [2, 4, 8, 16],
    },
}


@dataclass(frozen=True)
class SystemSection:
    n_donors: int
    n_acceptors: int
    omega_d: float
    omega_a: float
    omega_c: float
    rabi: float
    kappa: float
    gamma_rad: float
    layout: str
    profile: str
    length: float
    wall: float

    def make(self, **overrides):
        params = dict(
            n_donors=self.n_donors, n_acceptors=self.n_acceptors,
            omega_d=self.omega_d, omega_a=self.omega_a, omega_c=self.omega_c,
            rabi=self.rabi, kappa=self.kappa, gamma_rad=self.gamma_rad,
            layout=self.layout, profile=self.profile,
            length=self.length, wall_width=self.wall,
        )
        params.update(overrides)
        return make_system(**params)


@dataclass(frozen=True)
class BathSection:
    gamma_phi: float
    xi: float
    omega_vd: float | str
    omega_va: float | str

    def resolve(self, decomposition: PolaritonDecomposition,
                omega_vd: float | None = None, omega_va: float | None = None) -> BathSet:
        gaps = decomposition.resonance_gaps()
        wvd = omega_vd if omega_vd is not None else (
            gaps["up_minus_donor"] if self.omega_vd == "auto" else self.omega_vd)
        wva = omega_va if omega_va is not None else (
            gaps["mp_minus_acceptor"] if self.omega_va == "auto" else self.omega_va)
        return BathSet(
            donor=SpectralDensityParams(self.gamma_phi, float(wvd), self.xi, Species.DONOR),
            acceptor=SpectralDensityParams(self.gamma_phi, float(wva), self.xi, Species.ACCEPTOR),
        )


@dataclass(frozen=True)
class DriveSection:
    omega_p: float | str
    amplitude: float

    def resolve(self, decomposition: PolaritonDecomposition) -> DriveParams:
        freq = decomposition.omega_up if self.omega_p == "auto_up" else float(self.omega_p)
        return DriveParams(amplitude=self.amplitude, frequency=freq)


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    engine: str
    workers: int
    output: str
    redfield_dim_cap: int
    grids: dict[str, tuple]


@dataclass(frozen=True)
class FullConfig:
    system: SystemSection
    baths: BathSection
    drive: DriveSection
    sweep: SweepSpec
    resolved: dict = field(repr=False, default_factory=dict)

    def to_dict(self) -> dict:
        return self.resolved


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _check_unknown(section: str, data: dict) -> None:
    unknown = set(data) - set(_DEFAULTS[section])
    _require(not unknown, f"unknown key(s) in [{section}]: {sorted(unknown)}")


def _as_number(section, key, value, kind=float, positive=False, nonneg=False):
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        value = float(value)
    elif kind is int and isinstance(value, int) and not isinstance(value, bool):
        value = int(value)
    else:
        raise ConfigError(f"[{section}] {key} must be a {kind.__name__}, got {value!r}")
    _require(not positive or value > 0, f"[{section}] {key} must be > 0, got {value}")
    _require(not nonneg or value >= 0, f"[{section}] {key} must be >= 0, got {value}")
    return value


def _resolve_grid(section: str, key: str, value) -> tuple:
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "points"}
        _require(not unknown, f"[{section}] {key}: unknown grid field(s) {sorted(unknown)}")
        _require({"start", "stop", "points"} <= set(value),
                 f"[{section}] {key}: grid table needs start, stop, points")
        points = _as_number(section, f"{key}.points", value["points"], int, positive=True)
        start = _as_number(section, f"{key}.start", value["start"])
        stop = _as_number(section, f"{key}.stop", value["stop"])
        _require(stop >= start, f"[{section}] {key}: stop must be >= start")
        return tuple(float(x) for x in np.linspace(start, stop, points))
    if isinstance(value, (list, tuple)):
        _require(len(value) >= 1, f"[{section}] {key}: grid must be non-empty")
        vals = tuple(_as_number(section, key, v) for v in value)
        _require(all(b >= a for a, b in zip(vals, vals[1:])),
                 f"[{section}] {key}: grid must be ascending")
        return vals
    raise ConfigError(f"[{section}] {key} must be an array or a start/stop/points table")


def parse_config(text: str) -> FullConfig:
    """Parse and validate a TOML run configuration, filling baseline defaults."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc

    unknown = set(raw) - set(_DEFAULTS)
    _require(not unknown, f"unknown section(s): {sorted(unknown)}")
    merged = {}
    for section, defaults in _DEFAULTS.items():
        data = raw.get(section, {})
        _require(isinstance(data, dict), f"[{section}] must be a table")
        _check_unknown(section, data)
        merged[section] = {**defaults, **data}

    sys_d = merged["system"]
    system = SystemSection(
        n_donors=_as_number("system", "n_donors", sys_d["n_donors"], int, positive=True),
        n_acceptors=_as_number("system", "n_acceptors", sys_d["n_acceptors"], int, nonneg=True),
        omega_d=_as_number("system", "omega_d_ev", sys_d["omega_d_ev"], positive=True),
        omega_a=_as_number("system", "omega_a_ev", sys_d["omega_a_ev"], positive=True),
        omega_c=_as_number("system", "omega_c_ev", sys_d["omega_c_ev"], positive=True),
        rabi=_as_number("system", "rabi_ev", sys_d["rabi_ev"], positive=True),
        kappa=_as_number("system", "kappa_ev", sys_d["kappa_ev"], positive=True),
        gamma_rad=_as_number("system", "gamma_rad_ev", sys_d["gamma_rad_ev"], nonneg=True),
        layout=sys_d["layout"], profile=sys_d["profile"],
        length=_as_number("system", "length_nm", sys_d["length_nm"], positive=True),
        wall=_as_number("system", "wall_nm", sys_d["wall_nm"], nonneg=True),
    )
    _require(system.layout in ("separated", "intermixed"),
             f"[system] layout must be 'separated' or 'intermixed', got {system.layout!r}")
    _require(system.profile in ("fundamental", "second", "uniform"),
             f"[system] profile must be fundamental/second/uniform, got {system.profile!r}")
    _require(system.wall < system.length, "[system] wall_nm must be < length_nm")

    bath_d = merged["baths"]
    for key in ("omega_vd_ev", "omega_va_ev"):
        v = bath_d[key]
        if isinstance(v, str):
            _require(v == "auto", f"[baths] {key} must be a number or 'auto', got {v!r}")
        else:
            bath_d[key] = _as_number("baths", key, v, positive=True)
    baths = BathSection(
        gamma_phi=_as_number("baths", "gamma_phi_ev", bath_d["gamma_phi_ev"], nonneg=True),
        xi=_as_number("baths", "xi_ev", bath_d["xi_ev"], positive=True),
        omega_vd=bath_d["omega_vd_ev"], omega_va=bath_d["omega_va_ev"],
    )

    drive_d = merged["drive"]
    v = drive_d["omega_p_ev"]
    if isinstance(v, str):
        _require(v == "auto_up", f"[drive] omega_p_ev must be a number or 'auto_up', got {v!r}")
    else:
        drive_d["omega_p_ev"] = _as_number("drive", "omega_p_ev", v, positive=True)
    drive = DriveSection(
        omega_p=drive_d["omega_p_ev"],
        amplitude=_as_number("drive", "amplitude_ev", drive_d["amplitude_ev"], nonneg=True),
    )

    sweep_d = merged["sweep"]
    _require(sweep_d["kind"] in SWEEP_KINDS, f"[sweep] kind must be one of {SWEEP_KINDS}")
    _require(sweep_d["engine"] in ENGINES, f"[sweep] engine must be one of {ENGINES}")
    _require(isinstance(sweep_d["output"], str) and sweep_d["output"],
             "[sweep] output must be a non-empty string")
    grids = {
        "omega_vd": _resolve_grid("sweep", "omega_vd_grid", sweep_d["omega_vd_grid"]),
        "omega_va": _resolve_grid("sweep", "omega_va_grid", sweep_d["omega_va_grid"]),
        "rabi": _resolve_grid("sweep", "rabi_grid", sweep_d["rabi_grid"]),
        "cavity": _resolve_grid("sweep", "cavity_grid", sweep_d["cavity_grid"]),
    }
    sizes = sweep_d["sizes"]
    _require(isinstance(sizes, (list, tuple)) and len(sizes) >= 1,
             "[sweep] sizes must be a non-empty array of integers")
    sizes = tuple(_as_number("sweep", "sizes", s, int, positive=True) for s in sizes)
    _require(all(b >= a for a, b in zip(sizes, sizes[1:])), "[sweep] sizes must be ascending")
    grids["sizes"] = sizes
    sweep = SweepSpec(
        kind=sweep_d["kind"], engine=sweep_d["engine"],
        workers=_as_number("sweep", "workers", sweep_d["workers"], int, positive=True),
        output=sweep_d["output"],
        redfield_dim_cap=_as_number("sweep", "redfield_dim_cap",
                                    sweep_d["redfield_dim_cap"], int, positive=True),
        grids=grids,
    )

    resolved = {
        "system": {k: sys_d[k] for k in _DEFAULTS["system"]},
        "baths": {k: bath_d[k] for k in _DEFAULTS["baths"]},
        "drive": {k: drive_d[k] for k in _DEFAULTS["drive"]},
        "sweep": {
            "kind": sweep.kind, "engine": sweep.engine, "workers": sweep.workers,
            "output": sweep.output, "redfield_dim_cap": sweep.redfield_dim_cap,
            "omega_vd_grid": list(grids["omega_vd"]), "omega_va_grid": list(grids["omega_va"]),
            "rabi_grid": list(grids["rabi"]), "cavity_grid": list(grids["cavity"]),
            "sizes": list(sizes),
        },
    }
    return FullConfig(system=system, baths=baths, drive=drive, sweep=sweep, resolved=resolved)


def apply_overrides(text: str, overrides: list[str]) -> str:
    """Append ``section.key=value`` overrides to a TOML config text."""
    extra_lines = []
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        dotted, value = item.split("=", 1)
        parts = dotted.strip().split(".")
        if len(parts) != 2:
            raise ConfigError(f"override key must be section.key, got {dotted!r}")
        section, key = parts
        try:
            tomllib.loads(f"v = {value}")
            literal = value
        except tomllib.TOMLDecodeError:
            literal = f'"{value.strip()}"'
        extra_lines.append(f"[{section}]\n{key} = {literal}\n")
    return text + "\n" + "\n".join(extra_lines)
