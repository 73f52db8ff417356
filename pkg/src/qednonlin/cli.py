"""``qed-nonlin`` command line: one subcommand per experiment.

Exit codes: 0 success, 2 configuration error, 3 numeric error, 4 I/O error.
The output directory is taken from ``--out``, else ``$QED_NONLIN_OUT``, else
the config file.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import EXPERIMENTS, RunConfig, load_config
from .errors import ConfigError, NumericError, QedError
from .io import write_csv, write_gnuplot, write_json, write_manifest
from .lindblad import sweep_steady
from .maser import maser_scan, pi_pulse_length
from .mcwf import classify_jumps, ensemble_average
from .operators import basis_state, build_hamiltonian, standard_channels
from .params import derive_params, to_ghz
from .spectrum import TARGETS, locate_target, sweep_spectrum
from . import squeezing as sq

log = logging.getLogger("qednonlin")

ENV_OUT = "QED_NONLIN_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _derived_echo(d) -> dict:
    e = dataclasses.asdict(d)
    for k in ("E_C_over_hbar", "omega0", "kappa", "E_J_over_hbar", "gamma_minus", "gamma_phi"):
        e[k.replace("_over_hbar", "") + "_GHz"] = to_ghz(e[k])
    return e


def _anticrossing_json(ac, d) -> dict:
    return {
        "level_pair": list(ac.level_pair),
        "location_Ng": ac.location_Ng,
        "gap_GHz": to_ghz(ac.gap),
        "gap_over_E_J": ac.gap / d.E_J_over_hbar if d.E_J_over_hbar else math.nan,
        "theta_ex": ac.theta_ex,
        "diabatic_labels": [lab if isinstance(lab, str) else list(lab) for lab in ac.diabatic_labels],
    }


def run_spectrum(cfg: RunConfig, d, out: Path) -> list[Path]:
    exp = cfg.experiment
    res = sweep_spectrum(d, d.E_J_over_hbar, exp.theta_ex, exp.Ng, cfg.trunc, josephson=cfg.josephson)
    header = ["N_g[1]"] + [f"E_{k}[GHz]" for k in range(cfg.trunc.dim)]
    rows = [[ng, *to_ghz(lv)] for ng, lv in zip(res.sweep_values, res.levels)]
    files = [write_csv(out / "spectrum.csv", header, rows)]
    summary = {}
    for name in exp.anticrossings:
        ac = locate_target(d, name, t=cfg.trunc, tol=exp.tol, josephson=cfg.josephson)
        summary[name] = _anticrossing_json(ac, d)
    files.append(write_json(out / "anticrossings.json", summary))
    if cfg.emit_plots:
        n = min(cfg.trunc.dim, 12)
        files.append(write_gnuplot(out / "spectrum.gp", "spectrum.csv", 1, list(range(2, 2 + n)),
                                   f"spectrum theta_ex={exp.theta_ex:g}", "N_g", "E [GHz]"))
    return files


def run_maser(cfg: RunConfig, d, out: Path) -> list[Path]:
    exp = cfg.experiment
    ac = locate_target(d, exp.target, t=cfg.trunc, josephson=cfg.josephson)
    tau_pi = pi_pulse_length(ac)
    taus = np.asarray(exp.tau) * (tau_pi if exp.tau_in_pi else 1.0)
    scan = maser_scan(d, exp.target, taus, cfg.trunc, anticrossing=ac, josephson=cfg.josephson)
    k = TARGETS[exp.target].photons
    rows = [(p.tau, p.N_c, p.N_p, p.mandel_Q, p.photon_distribution[k], p.trace_defect) for p in scan.points]
    header = ["tau[ns]", "N_c[1]", "N_p[1]", "Q_M[1]", f"P_{k}[1]", "trace_defect[1]"]
    files = [write_csv(out / f"maser_{exp.target}.csv", header, rows)]
    at_pi = maser_scan(d, exp.target, [tau_pi], cfg.trunc, anticrossing=ac, josephson=cfg.josephson).points[0]
    files.append(write_csv(out / f"photon_distribution_{exp.target}.csv", ["n_p[1]", "P[1]"],
                           list(enumerate(at_pi.photon_distribution))))
    files.append(write_json(out / f"maser_{exp.target}.json", {
        "anticrossing": _anticrossing_json(ac, d), "tau_pi_ns": tau_pi,
        "P_target_at_tau_pi": at_pi.photon_distribution[k], "Q_M_at_tau_pi": at_pi.mandel_Q,
    }))
    if cfg.emit_plots:
        files.append(write_gnuplot(out / f"maser_{exp.target}.gp", f"maser_{exp.target}.csv", 1, [2, 3, 4],
                                   f"maser {exp.target}", "tau [ns]", ""))
    return files


def run_steady(cfg: RunConfig, d, out: Path) -> list[Path]:
    exp = cfg.experiment
    g = sweep_steady(d, exp.Ng, exp.theta_ex, cfg.trunc, josephson=cfg.josephson)
    rows = []
    for i, th in enumerate(g.theta_ex_grid):
        for j, ng in enumerate(g.Ng_grid):
            rows.append((ng, th, g.N_c[i, j], g.N_p[i, j], g.residual[i, j], g.trace_defect[i, j], g.min_eig[i, j]))
    header = ["N_g[1]", "theta_ex[rad]", "N_c_ss[1]", "N_p_ss[1]", "residual[1]", "trace_defect[1]", "min_eig[1]"]
    files = [write_csv(out / "steady.csv", header, rows)]
    if g.errors:
        files.append(write_json(out / "steady_errors.json", [{"point": p, "error": e} for p, e in g.errors]))
    if cfg.emit_plots:
        gp = out / "steady.gp"
        gp.write_text(
            "set datafile separator ','\nset dgrid3d {} ,{}\nset xlabel 'N_g'\nset ylabel 'theta_ex'\n"
            "set terminal pngcairo size 900,600\nset output 'steady.png'\n"
            "splot 'steady.csv' using 1:2:4 with pm3d title 'N_p_ss'\n".format(len(g.theta_ex_grid), len(g.Ng_grid))
        )
        files.append(gp)
    return files


def run_mcwf(cfg: RunConfig, d, out: Path) -> list[Path]:
    exp = cfg.experiment
    t = cfg.trunc
    seed0 = cfg.seed if cfg.seed is not None else exp.seed0
    H = build_hamiltonian(d, None, exp.Ng, t, josephson=cfg.josephson, theta_ex=exp.theta_ex)
    ch = standard_channels(d, t)
    psi0 = basis_state(t, *exp.initial)
    ens = ensemble_average(H, ch, psi0, exp.t_end_ns, exp.sample_dt_ns, exp.n_traj, seed0, t, keep_records=True)
    files = []
    for rec in ens.extra["records"][: exp.write_trajectories]:
        rows = zip(rec.times, rec.N_p_series, rec.N_c_series, rec.parity_weight_series)
        files.append(write_csv(out / f"trajectory_{rec.seed}.csv",
                               ["time[ns]", "N_p[1]", "N_c[1]", "parity_weight[1]"], rows))
        files.append(write_json(out / f"jumps_{rec.seed}.json", [
            {"time_ns": ev.time, "channel": ev.channel, "delta_N_p": ev.delta_Np} for ev in rec.jumps
        ]))
    files.append(write_csv(out / "ensemble.csv", ["time[ns]", "N_p[1]", "N_p_sem[1]", "N_c[1]", "N_c_sem[1]"],
                           zip(ens.times, ens.N_p, ens.N_p_err, ens.N_c, ens.N_c_err)))
    counts: dict[str, int] = {}
    for rec in ens.extra["records"]:
        for k, v in classify_jumps(rec).counts.items():
            counts[k] = counts.get(k, 0) + v
    files.append(write_json(out / "jump_summary.json", {"counts": counts, "n_traj": exp.n_traj, "seed0": seed0}))
    if cfg.emit_plots:
        files.append(write_gnuplot(out / "ensemble.gp", "ensemble.csv", 1, [2, 4], "MCWF ensemble", "t [ns]", ""))
    return files


def run_squeeze(cfg: RunConfig, d, out: Path) -> list[Path]:
    exp = cfg.experiment
    rows = []
    for mu in exp.mu:
        m = sq.field_ss(mu)
        dx1, dx2 = sq.quadrature_ss(mu)
        rows.append((mu, m.N_p, m.B_tilde.real, dx1, dx2))
    files = [write_csv(out / "squeeze_closed_form.csv",
                       ["mu[1]", "N_p_ss[1]", "B_ss[1]", "dX1[1]", "dX2[1]"], rows)]
    p = sq.DriveParams.from_derived(d, Omega=2 * math.pi * exp.Omega_GHz)
    lam = sq.lambda_ss(p)
    mu_lim = sq.mu_max(d.n_p_max_physical)
    mu_run = exp.mu_series if exp.mu_series is not None else mu_lim
    kappa, Q = sq.required_kappa_for(mu_run, lam, d.theta_L, d.E_J_over_hbar, d.omega0)
    relax = p.gamma_minus / 2 + p.gamma_phi
    q = sq.integrate_qubit_rwa(p, sq.ReducedQubitState(0.0, 0j), exp.t_end_ns or 20.0 / relax, exp.n_out)
    files.append(write_csv(out / "qubit_rwa.csv", ["time[ns]", "rho11[1]", "Im_rho10[1]"],
                           zip(q.times, q.rho11, q.rho10_tilde.imag)))
    pf = p.with_(kappa=kappa)
    f = sq.integrate_field_rwa(pf, sq.VACUUM, lam, exp.t_end_ns or 15.0 / kappa, exp.n_out)
    files.append(write_csv(out / "field_rwa.csv", ["time[ns]", "N_p[1]", "Re_B[1]"],
                           zip(f.times, f.N_p, f.B_tilde.real)))
    dx1, dx2 = sq.quadrature_ss(mu_run)
    files.append(write_json(out / "squeeze.json", {
        "lambda": lam, "drive_coupling_GHz": to_ghz(p.drive_coupling), "mu_max": mu_lim, "mu": mu_run,
        "kappa_GHz": to_ghz(kappa), "Q_factor": Q, "dX1": dx1, "dX2": dx2, "theta_L": d.theta_L,
    }))
    if cfg.emit_plots:
        files.append(write_gnuplot(out / "squeeze.gp", "squeeze_closed_form.csv", 1, [4, 5],
                                   "steady-state quadratures", "mu", "dX"))
    return files


RUNNERS = {
    "spectrum": run_spectrum,
    "maser": run_maser,
    "steady": run_steady,
    "mcwf": run_mcwf,
    "squeeze": run_squeeze,
}


def run(cfg: RunConfig) -> int:
    """Dispatch one experiment, write outputs and the manifest; return the exit code."""
    t0 = time.perf_counter()
    out = Path(cfg.output_dir)
    try:
        d = derive_params(cfg.physical)
        out.mkdir(parents=True, exist_ok=True)
        files = RUNNERS[cfg.kind](cfg, d, out)
        write_manifest(out, cfg.echo(), _derived_echo(d), __version__, time.perf_counter() - t0, files)
    except ConfigError as exc:
        log.error("[%s] %s", exc.module, exc)
        return EXIT_CONFIG
    except (NumericError, np.linalg.LinAlgError, ArithmeticError) as exc:
        module = getattr(exc, "module", "numeric")
        log.error("[%s.%s] %s", cfg.kind, module, exc)
        return EXIT_NUMERIC
    except QedError as exc:
        log.error("[%s.%s] %s", cfg.kind, exc.module, exc)
        return exc.code
    except OSError as exc:
        log.error("[io] %s", exc)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qed-nonlin", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", type=Path, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, args.command)
    except ConfigError as exc:
        log.error("[config] %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("[io] cannot read config: %s", exc)
        return EXIT_IO
    out = args.out or (Path(os.environ[ENV_OUT]) if os.environ.get(ENV_OUT) else None)
    if out is not None:
        cfg = dataclasses.replace(cfg, output_dir=out)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
