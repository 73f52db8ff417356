"""Run configuration: a TOML document with four sections.

``[physical]``
    ``C_g_aF``, ``C_j_aF``, ``L_nH``, ``C_aF``, ``E_J_GHz`` (E_J/h),
    ``gamma_minus_GHz``, ``gamma_phi_GHz`` (rates divided by 2 pi), ``xi``,
    ``theta_ex`` (rad), ``Q_factor``, ``josephson`` ("half" or "unit").
    Every key is optional; omitted values take the reference device numbers.
``[truncation]``
    ``n_c_max``, ``n_p_max``. Defaults depend on the experiment.
``[experiment]``
    ``type`` plus the keys of the matching experiment class below. A grid is
    either a list of numbers or a table ``{start, stop, num}``.
``[output]``
    ``dir``, ``emit_plots``.
"""
from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Union

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigError, InvalidParameterError
from .operators import JOSEPHSON_HALF, JOSEPHSON_UNIT
from .params import TWO_PI, PhysicalParams, Truncation

EXPERIMENTS = ("spectrum", "maser", "steady", "mcwf", "squeeze")


@dataclass(frozen=True)
class SpectrumExperiment:
    Ng: tuple = tuple(np.linspace(0.0, 1.0, 101))
    theta_ex: float = 0.0
    anticrossings: tuple = ("A1", "A2", "A3")
    tol: float = 1e-5


@dataclass(frozen=True)
class MaserExperiment:
    target: str = "A2"
    tau: tuple = tuple(np.linspace(0.0, 4.0, 81))
    # tau values measured in units of the refined pi-pulse length
    tau_in_pi: bool = True


@dataclass(frozen=True)
class SteadyExperiment:
    Ng: tuple = tuple(np.linspace(0.0, 0.5, 26))
    theta_ex: tuple = tuple(np.linspace(0.0, math.pi / 2, 11))


@dataclass(frozen=True)
class McwfExperiment:
    n_traj: int = 20
    t_end_ns: float = 100.0
    sample_dt_ns: float = 0.02
    seed0: int = 0
    Ng: float = 0.5
    theta_ex: float = 0.0
    initial: tuple = (0, 0)
    write_trajectories: int = 20


@dataclass(frozen=True)
class SqueezeExperiment:
    mu: tuple = tuple(np.linspace(0.0, 0.95, 20))
    Omega_GHz: float = 0.5
    # field series is run at this mu (default: the charge-qubit limit mu_max)
    mu_series: float | None = None
    t_end_ns: float | None = None
    n_out: int = 401


Experiment = Union[SpectrumExperiment, MaserExperiment, SteadyExperiment, McwfExperiment, SqueezeExperiment]
_EXP_CLASSES = {
    "spectrum": SpectrumExperiment,
    "maser": MaserExperiment,
    "steady": SteadyExperiment,
    "mcwf": McwfExperiment,
    "squeeze": SqueezeExperiment,
}
_DEFAULT_TRUNC = {
    "spectrum": Truncation(4, 12),
    "maser": Truncation(1, 30),
    "steady": Truncation(1, 20),
    "mcwf": Truncation(1, 20),
    "squeeze": Truncation(1, 30),
}
_GRID_FIELDS = {
    "spectrum": {"Ng"},
    "maser": {"tau"},
    "steady": {"Ng", "theta_ex"},
    "mcwf": set(),
    "squeeze": {"mu"},
}

_PHYSICAL_KEYS = {
    # key: (field, scale)
    "C_g_aF": ("C_g", 1.0),
    "C_j_aF": ("C_j", 1.0),
    "L_nH": ("L", 1.0),
    "C_aF": ("C", 1.0),
    "E_J_GHz": ("E_J_over_hbar", TWO_PI),
    "gamma_minus_GHz": ("gamma_minus", TWO_PI),
    "gamma_phi_GHz": ("gamma_phi", TWO_PI),
    "xi": ("xi", 1.0),
    "theta_ex": ("theta_ex", 1.0),
    "Q_factor": ("Q_factor", 1.0),
}


@dataclass(frozen=True)
class RunConfig:
    physical: PhysicalParams
    trunc: Truncation
    kind: str
    experiment: Experiment
    output_dir: Path = Path("out")
    emit_plots: bool = False
    josephson: float = JOSEPHSON_HALF
    seed: int | None = None
    raw: dict = field(default_factory=dict, compare=False)

    def echo(self) -> dict:
        return {
            "physical": asdict(self.physical),
            "truncation": asdict(self.trunc),
            "experiment": {"type": self.kind, **asdict(self.experiment)},
            "josephson": self.josephson,
            "output": {"dir": str(self.output_dir), "emit_plots": self.emit_plots},
            "seed": self.seed,
        }


def _grid(name: str, value) -> tuple:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value),)
    if isinstance(value, list):
        if not value:
            raise ConfigError(f"grid '{name}' is empty")
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError):
            raise ConfigError(f"grid '{name}' must contain numbers") from None
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "num"}
        if unknown:
            raise ConfigError(f"unknown key '{sorted(unknown)[0]}' in grid '{name}'")
        try:
            num = int(value.get("num", 0))
            start, stop = float(value["start"]), float(value["stop"])
        except KeyError as exc:
            raise ConfigError(f"grid '{name}' is missing '{exc.args[0]}'") from None
        if num < 1:
            raise ConfigError(f"grid '{name}' needs num >= 1")
        return tuple(np.linspace(start, stop, num))
    raise ConfigError(f"cannot read grid '{name}' from {value!r}")


def _check_keys(section: str, table: dict, allowed) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in [{section}]")


def _experiment(kind: str, table: dict):
    cls = _EXP_CLASSES[kind]
    names = {f.name for f in fields(cls)}
    _check_keys("experiment", table, names)
    kw = {}
    for key, value in table.items():
        if key in _GRID_FIELDS[kind]:
            kw[key] = _grid(key, value)
        elif key in ("anticrossings", "initial"):
            kw[key] = tuple(value)
        else:
            kw[key] = value
    try:
        exp = cls(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    _validate_experiment(kind, exp)
    return exp


def _validate_experiment(kind: str, exp) -> None:
    if kind == "maser" and exp.target not in ("A1", "A2", "A3"):
        raise ConfigError(f"maser target must be A1, A2 or A3, got {exp.target!r}")
    if kind == "maser" and min(exp.tau) < 0:
        raise ConfigError("tau values must be non-negative")
    if kind == "spectrum":
        bad = [a for a in exp.anticrossings if a not in ("A1", "A2", "A3")]
        if bad:
            raise ConfigError(f"unknown anticrossing {bad[0]!r}")
    if kind == "steady":
        if min(exp.Ng) < 0 or max(exp.Ng) > 1:
            raise ConfigError("steady Ng grid must lie in [0, 1]")
    if kind == "mcwf" and (exp.n_traj < 1 or exp.t_end_ns <= 0 or exp.sample_dt_ns <= 0):
        raise ConfigError("mcwf needs n_traj >= 1 and positive t_end_ns, sample_dt_ns")
    if kind == "squeeze" and (min(exp.mu) < 0 or max(exp.mu) >= 1):
        raise ConfigError("squeeze mu grid must lie in [0, 1)")


def parse_config(text: str, experiment: str | None = None) -> RunConfig:
    """Parse and validate a TOML run configuration.

    ``experiment`` (the CLI subcommand) supplies the type when the document
    does not; if both are given they must agree.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    _check_keys("top level", doc, {"physical", "truncation", "experiment", "output"})

    exp_table = dict(doc.get("experiment", {}))
    kind = exp_table.pop("type", None)
    if kind is None and not exp_table and experiment is None:
        raise ConfigError("missing experiment")
    if kind is None:
        kind = experiment
    if kind is None:
        raise ConfigError("missing experiment type")
    if experiment is not None and kind != experiment:
        raise ConfigError(f"config describes experiment '{kind}' but '{experiment}' was requested")
    if kind not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment '{kind}'")

    phys_table = dict(doc.get("physical", {}))
    _check_keys("physical", phys_table, set(_PHYSICAL_KEYS) | {"josephson"})
    jos = phys_table.pop("josephson", "half")
    if jos not in ("half", "unit"):
        raise ConfigError("josephson must be 'half' or 'unit'")
    kw = {}
    for key, value in phys_table.items():
        name, scale = _PHYSICAL_KEYS[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"[physical] {key} must be a number")
        kw[name] = float(value) * scale
    try:
        physical = PhysicalParams(**kw)
    except InvalidParameterError as exc:
        raise ConfigError(f"invariant violated: {exc}") from None

    tr_table = doc.get("truncation", {})
    _check_keys("truncation", tr_table, {"n_c_max", "n_p_max"})
    base = _DEFAULT_TRUNC[kind]
    try:
        trunc = Truncation(int(tr_table.get("n_c_max", base.n_c_max)), int(tr_table.get("n_p_max", base.n_p_max)))
    except (InvalidParameterError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid truncation: {exc}") from None

    out_table = doc.get("output", {})
    _check_keys("output", out_table, {"dir", "emit_plots"})

    return RunConfig(
        physical=physical,
        trunc=trunc,
        kind=kind,
        experiment=_experiment(kind, exp_table),
        output_dir=Path(out_table.get("dir", "out")),
        emit_plots=bool(out_table.get("emit_plots", False)),
        josephson=JOSEPHSON_HALF if jos == "half" else JOSEPHSON_UNIT,
        raw=doc,
    )


def load_config(path, experiment: str | None = None) -> RunConfig:
    return parse_config(Path(path).read_text(), experiment)
