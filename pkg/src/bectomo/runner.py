"""Config-driven batch runner: simulate, reconstruct, compare, persist.

A run is described by a TOML config (scenario presets ship with the
package), executes the full pipeline deterministically from one master
seed, and writes every intermediate artifact plus a JSON report and a
MANIFEST with content hashes into the output directory.

Seed splitting: the master seed feeds numpy's SeedSequence; replicate
seeds are SeedSequence(master).generate_state(n), and each scan splits
its own seed per setting/phase, so outputs are independent of evaluation
order and thread count.
"""

import argparse
import hashlib
import json
import sys
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import io as bio
from .dn_tomo import (
    ConditioningError,
    DataInconsistencyError,
    beta_tradeoff_report,
    build_design,
    reconstruct_fock,
)
from .forward import scan_phase, scan_spin
from .quasiprob import fidelity, q_plane, q_sphere, wigner_plane
from .spin_tomo import QuadratureGrid, condition_report, reconstruct_spin
from .states import (
    DensityMatrix,
    atomic_coherent_amplitudes,
    density_from_vector,
    fock_state,
    squeezed_coefficients,
    two_mode_spin_squeezed,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

SCENARIOS = ("fig1", "fig2", "fig3", "fig4")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scheme: str
    state: dict
    measurement: dict
    reconstruction: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    scenario: str = "custom"

    @classmethod
    def from_dict(cls, d):
        known = {"scheme", "state", "measurement", "reconstruction", "output",
                 "scenario"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config sections/keys: {sorted(unknown)}")
        try:
            return cls(
                scheme=d["scheme"],
                state=dict(d.get("state", {})),
                measurement=dict(d.get("measurement", {})),
                reconstruction=dict(d.get("reconstruction", {})),
                output=dict(d.get("output", {})),
                scenario=d.get("scenario", "custom"),
            )
        except KeyError as exc:
            raise ConfigError(f"missing required config key: {exc}") from exc

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "scheme": self.scheme,
            "state": self.state,
            "measurement": self.measurement,
            "reconstruction": self.reconstruction,
            "output": self.output,
        }


def load_config(path=None, scenario=None):
    """Load a config file, a bundled scenario preset, or merge both."""
    if path is None and scenario is None:
        raise ConfigError("either a config path or a scenario name is required")
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    else:
        if scenario not in SCENARIOS:
            raise ConfigError(
                f"unknown scenario {scenario!r}; available: {', '.join(SCENARIOS)}"
            )
        ref = resources.files("bectomo.scenarios") / f"{scenario}.toml"
        data = tomllib.loads(ref.read_text())
    return RunConfig.from_dict(data)


def build_state(cfg):
    """Construct the true density matrix from the [state] section."""
    kind = cfg.get("kind")
    if kind == "fock":
        v = fock_state(cfg["n"], cfg.get("n_trunc", cfg["n"]))
    elif kind == "squeezed":
        v = squeezed_coefficients(cfg["x0"], cfg["r"], cfg["n_trunc"])
    elif kind == "two_mode_squeezed":
        v = two_mode_spin_squeezed(cfg["x0"], cfg["r"], cfg["n_total"])
    elif kind == "atomic_coherent":
        v = atomic_coherent_amplitudes(cfg["j"], cfg["theta"], cfg["phi"])
    else:
        raise ConfigError(f"unknown state kind {kind!r}")
    return density_from_vector(v)


def validate(config):
    """All cross-module precondition checks, without computing.

    Returns a list of error strings; empty means the config is runnable.
    """
    errors = []
    if config.scheme not in ("spin", "displaced_number"):
        errors.append(f"scheme must be 'spin' or 'displaced_number', got {config.scheme!r}")
        return errors
    try:
        rho = build_state(config.state)
    except (ConfigError, ValueError, IndexError, KeyError) as exc:
        errors.append(f"state: {exc}")
        rho = None
    m = config.measurement
    runs = m.get("runs")
    if runs is not None and runs != 0 and runs < 1:
        errors.append(f"measurement.runs must be >= 1 or absent, got {runs}")
    if m.get("noise_model", "multinomial") not in ("multinomial", "gaussian"):
        errors.append(f"unknown noise model {m.get('noise_model')!r}")
    if config.scheme == "spin":
        if rho is not None and rho.basis != "spin":
            errors.append("spin scheme needs a spin-basis state (two_mode_squeezed or atomic_coherent)")
        if rho is not None:
            tj = int(round(2 * rho.j))
            if m.get("n_theta", tj + 2) < tj + 1:
                errors.append(f"n_theta={m.get('n_theta')} below exactness bound {tj + 1}")
            if m.get("n_phi", 2 * tj + 3) < 2 * tj + 1:
                errors.append(f"n_phi={m.get('n_phi')} below exactness bound {2 * tj + 1}")
    else:
        eta = m.get("eta", 1.0)
        if not (0.0 < eta <= 1.0):
            errors.append(f"detector efficiency must satisfy 0 < eta <= 1 "
                          f"(binomial count convolution), got {eta}")
        if rho is not None and rho.basis != "fock":
            errors.append("displaced_number scheme needs a fock-basis state")
        beta = m.get("beta_abs")
        if beta is None:
            errors.append("measurement.beta_abs is required for displaced_number")
        elif beta < 0:
            errors.append(f"beta_abs must be >= 0, got {beta}")
        if rho is not None:
            n1 = config.reconstruction.get("n1", rho.n_trunc)
            n_count = config.reconstruction.get("n_count", n1 + 5)
            k = m.get("k_phases", 2 * n1 + 3)
            if n_count < n1:
                errors.append(f"n_count={n_count} must be >= n1={n1}")
            if k < 2 * n1 + 1:
                errors.append(f"k_phases={k} below Fourier exactness bound {2 * n1 + 1}")
            if beta == 0 and n1 >= 1:
                errors.append("beta_abs=0 makes every off-diagonal band unobservable")
    return errors


def _replicate_seeds(master, n):
    return [int(s) for s in np.random.SeedSequence(master).generate_state(n)]


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir, complete):
    files = {
        p.name: _sha256(p)
        for p in sorted(out_dir.iterdir())
        if p.is_file() and p.name not in ("MANIFEST.json", "LOCK")
    }
    bio.write_json(out_dir / "MANIFEST.json", {"complete": complete, "files": files})


def _plane_axes(out_cfg):
    half = out_cfg.get("plane_half_width", 5.0)
    pts = out_cfg.get("plane_points", 101)
    ax = np.linspace(-half, half, pts)
    return ax, ax


def _run_spin(config, out_dir, exact, report):
    rho_true = build_state(config.state)
    m = config.measurement
    tj = int(round(2 * rho_true.j))
    grid = QuadratureGrid.build(rho_true.j, m.get("n_theta"), m.get("n_phi"))
    runs = None if exact or not m.get("runs") else int(m["runs"])
    data = scan_spin(
        rho_true, grid.settings(), runs=runs, seed=m.get("seed", 0),
        noise_model=m.get("noise_model", "gaussian"),
        gaussian_scale=m.get("gaussian_scale", 1.0),
    )
    bio.write_spin_marginals(out_dir / "marginals.csv", data)
    rho_rec, diag = reconstruct_spin(data, grid)
    bio.write_density_matrix(out_dir / "rho_true.csv", rho_true)
    bio.write_density_matrix(out_dir / "rho_reconstructed.csv", rho_rec)
    bio.write_json(out_dir / "diagnostics.json", diag)
    g_true = q_sphere(rho_true)
    g_rec = q_sphere(rho_rec)
    bio.write_quasiprob(out_dir / "q_sphere_true.csv", g_true)
    bio.write_quasiprob(out_dir / "q_sphere_reconstructed.csv", g_rec)
    report["fidelity"] = fidelity(rho_true, rho_rec)
    report["max_abs_rho_error"] = float(np.max(np.abs(rho_rec.entries - rho_true.entries)))
    report["max_abs_q_error"] = float(np.max(np.abs(g_rec.values - g_true.values)))
    report["corrections"] = diag
    report["grid"] = {"n_theta": grid.n_theta, "n_phi": grid.n_phi}


def _mask_insignificant(mean, se, threshold=5.0):
    """Zero off-diagonal estimates not exceeding threshold x their standard error."""
    masked = mean.copy()
    n = mean.shape[0]
    for r in range(n):
        for c in range(n):
            if r != c and abs(mean[r, c]) <= threshold * max(se[r, c], 1e-300):
                masked[r, c] = 0.0
    masked = 0.5 * (masked + masked.conj().T)
    tr = np.trace(masked).real
    if abs(tr) > 1e-12:
        masked = masked / tr
    return DensityMatrix(masked, basis="fock")


def _run_displaced(config, out_dir, exact, report):
    rho_true = build_state(config.state)
    m = config.measurement
    rcfg = config.reconstruction
    n1 = rcfg.get("n1", rho_true.n_trunc)
    if n1 != rho_true.n_trunc:
        raise ConfigError(
            f"reconstruction.n1={n1} must match the state truncation "
            f"{rho_true.n_trunc} (pad or extend the state)"
        )
    n_count = rcfg.get("n_count", n1 + 5)
    k_phases = m.get("k_phases", 2 * n1 + 3)
    beta = m["beta_abs"]
    eta = m.get("eta", 1.0)
    runs = None if exact or not m.get("runs") else int(m["runs"])
    random_phase = bool(m.get("random_phase", False))
    design = build_design(beta, n1, n_count, eta)
    bio.write_json(
        out_dir / "design_report.json",
        {"beta_abs": beta, "eta": eta, "n1": n1, "n_count": n_count,
         "condition_numbers": design.cond.tolist()},
    )
    n_rep = int(rcfg.get("replicates", 5)) if random_phase and runs is not None else 1
    seeds = _replicate_seeds(m.get("seed", 0), n_rep)
    estimates, diag = [], None
    for i, seed in enumerate(seeds):
        scan = scan_phase(
            rho_true, beta, k_phases, n_count, eta=eta, runs=runs, seed=seed,
            noise_model=m.get("noise_model", "multinomial"),
            gaussian_scale=m.get("gaussian_scale", 1.0),
            random_phase=random_phase,
        )
        if i == 0:
            bio.write_phase_scan(out_dir / "phase_scan.csv", scan)
        rec, diag = reconstruct_fock(scan, design)
        estimates.append(rec.entries)
    est = np.array(estimates)
    rho_rec = DensityMatrix(est[0], basis="fock")
    bio.write_density_matrix(out_dir / "rho_true.csv", rho_true)
    bio.write_density_matrix(out_dir / "rho_reconstructed.csv", rho_rec)
    bio.write_json(out_dir / "diagnostics.json", diag)
    report["corrections"] = diag
    report["condition_numbers"] = design.cond.tolist()
    report["fidelity"] = fidelity(rho_true, rho_rec)
    rho_plot = rho_rec
    if random_phase and n_rep > 1:
        mean = est.mean(axis=0)
        se = np.abs(est.std(axis=0, ddof=1)) / np.sqrt(n_rep)
        off = ~np.eye(n1 + 1, dtype=bool)
        ratios = np.abs(mean[off]) / np.maximum(se[off], 1e-300)
        report["offdiag_max_significance"] = float(ratios.max())
        report["offdiag_all_insignificant"] = bool(ratios.max() <= 5.0)
        rho_plot = _mask_insignificant(mean, se)
        bio.write_density_matrix(out_dir / "rho_masked.csv", rho_plot)
        mixture = DensityMatrix(np.diag(np.diag(rho_true.entries)), basis="fock")
        report["fidelity_vs_phase_averaged"] = fidelity(mixture, rho_plot)
    re_ax, im_ax = _plane_axes(config.output)
    which = config.output.get("quasiprob", "wigner")
    if which in ("wigner", "both"):
        g_true = wigner_plane(rho_true, re_ax, im_ax)
        if random_phase and n_rep > 1:
            # the same 5-sigma significance logic as the matrix elements,
            # applied pointwise to the replicate Wigner grids
            grids = np.array(
                [wigner_plane(DensityMatrix(e, basis="fock"), re_ax, im_ax).values
                 for e in est]
            )
            w_mean = grids.mean(axis=0)
            w_se = grids.std(axis=0, ddof=1) / np.sqrt(n_rep)
            w_vals = np.where(np.abs(w_mean) > 5.0 * w_se, w_mean, 0.0)
            g_rec = wigner_plane(rho_plot, re_ax, im_ax)
            g_rec.values = w_vals
        else:
            g_rec = wigner_plane(rho_plot, re_ax, im_ax)
        bio.write_quasiprob(out_dir / "wigner_true.csv", g_true)
        bio.write_quasiprob(out_dir / "wigner_reconstructed.csv", g_rec)
        report["wigner_rec_at_origin"] = float(
            g_rec.values[len(re_ax) // 2, len(im_ax) // 2]
        )
        report["wigner_rec_min"] = float(g_rec.values.min())
        report["wigner_positive"] = bool(g_rec.values.min() >= -1e-9)
    if which in ("q", "both"):
        bio.write_quasiprob(out_dir / "q_plane_true.csv", q_plane(rho_true, re_ax, im_ax))
        bio.write_quasiprob(out_dir / "q_plane_reconstructed.csv", q_plane(rho_plot, re_ax, im_ax))


def run(config, out_dir, exact=False, seed=None):
    """Execute the full pipeline for one config; returns the report dict."""
    errors = validate(config)
    if errors:
        raise ConfigError("; ".join(errors))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / "LOCK"
    if lock.exists():
        raise RuntimeError(f"run directory {out_dir} is locked by another run")
    if seed is not None:
        config.measurement["seed"] = seed
    lock.write_text(str(time.time()))
    t0 = time.perf_counter()
    report = {
        "scenario": config.scenario,
        "scheme": config.scheme,
        "exact": exact,
        "seed": config.measurement.get("seed", 0),
        "parameters": config.to_dict(),
    }
    try:
        bio.write_json(out_dir / "config_resolved.json", config.to_dict())
        if config.scheme == "spin":
            _run_spin(config, out_dir, exact, report)
        else:
            _run_displaced(config, out_dir, exact, report)
        report["wall_time_s"] = time.perf_counter() - t0
        bio.write_json(out_dir / "report.json", report)
        _write_manifest(out_dir, complete=True)
    except BaseException as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        try:
            bio.write_json(out_dir / "report.json", report)
            _write_manifest(out_dir, complete=False)
        finally:
            lock.unlink(missing_ok=True)
        raise
    lock.unlink(missing_ok=True)
    return report


def render_report(run_dir):
    """Human-readable summary of a completed run directory."""
    run_dir = Path(run_dir)
    rep = bio.read_json(run_dir / "report.json")
    man = bio.read_json(run_dir / "MANIFEST.json") if (run_dir / "MANIFEST.json").exists() else None
    lines = [
        f"scenario : {rep.get('scenario')}",
        f"scheme   : {rep.get('scheme')}",
        f"seed     : {rep.get('seed')}  exact={rep.get('exact')}",
    ]
    for key in ("fidelity", "max_abs_rho_error", "max_abs_q_error",
                "wigner_rec_at_origin", "wigner_rec_min", "wigner_positive",
                "offdiag_max_significance", "offdiag_all_insignificant",
                "wall_time_s"):
        if key in rep:
            val = rep[key]
            lines.append(f"{key:<28}: {val:.6g}" if isinstance(val, float) else f"{key:<28}: {val}")
    if "condition_numbers" in rep:
        conds = ", ".join(f"{c:.3g}" for c in rep["condition_numbers"])
        lines.append(f"condition numbers per s     : {conds}")
    if "error" in rep:
        lines.append(f"ERROR: {rep['error']}")
    if man is not None:
        lines.append(f"artifacts ({'complete' if man['complete'] else 'INCOMPLETE'}):")
        for name in sorted(man["files"]):
            lines.append(f"  {man['files'][name][:12]}  {name}")
    return "\n".join(lines)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="bectomo",
        description="Atom-counting tomography simulator: simulate, reconstruct, compare.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="TOML config file")
        p.add_argument("--scenario", choices=SCENARIOS, help="bundled scenario preset")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--threads", type=int, default=None,
                       help="accepted for interface compatibility; results are "
                            "independent of thread count")

    p_run = sub.add_parser("run", help="execute the full pipeline")
    add_common(p_run)
    p_run.add_argument("--exact", action="store_true", help="noise-free probabilities")
    p_run.add_argument("--out", type=Path, required=True, help="output directory")

    p_val = sub.add_parser("validate", help="check a config without computing")
    add_common(p_val)

    p_rep = sub.add_parser("report", help="summarize a completed run directory")
    p_rep.add_argument("run_dir", type=Path)

    p_des = sub.add_parser("design-report", help="design matrix condition numbers")
    add_common(p_des)

    p_bt = sub.add_parser("beta-tradeoff", help="per-element error vs |beta| table")
    add_common(p_bt)
    p_bt.add_argument("--out", type=Path, required=True, help="output CSV path")
    p_bt.add_argument("--betas", type=float, nargs="+",
                      default=[0.05, 0.3, 1.1, 1.5])
    p_bt.add_argument("--n-seeds", type=int, default=50)

    args = parser.parse_args(argv)

    if args.verb == "report":
        try:
            print(render_report(args.run_dir))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot read run directory: {exc}", file=sys.stderr)
            return EXIT_IO
        return EXIT_OK

    try:
        config = load_config(args.config, args.scenario)
    except (ConfigError, tomllib.TOMLDecodeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.verb == "validate":
        errors = validate(config)
        if errors:
            for e in errors:
                print(f"error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        print("config is valid")
        return EXIT_OK

    if args.verb == "design-report":
        if config.scheme != "displaced_number":
            print("design-report needs a displaced_number config", file=sys.stderr)
            return EXIT_CONFIG
        try:
            rho = build_state(config.state)
            n1 = config.reconstruction.get("n1", rho.n_trunc)
            n_count = config.reconstruction.get("n_count", n1 + 5)
            design = build_design(config.measurement["beta_abs"], n1, n_count,
                                  config.measurement.get("eta", 1.0))
        except ConditioningError as exc:
            print(f"conditioning error: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"|beta|={design.beta_abs} eta={design.eta} n1={design.n1} "
              f"n_count={design.n_count}")
        for s, c in enumerate(design.cond):
            print(f"  s={s:<3d} cond(A^(s)) = {c:.6g}")
        return EXIT_OK

    if args.verb == "beta-tradeoff":
        try:
            rho = build_state(config.state)
            records = beta_tradeoff_report(
                rho, args.betas, config.measurement.get("runs", 300000),
                _replicate_seeds(args.seed if args.seed is not None
                                 else config.measurement.get("seed", 0),
                                 args.n_seeds),
                eta=config.measurement.get("eta", 1.0),
            )
            bio.write_beta_tradeoff(args.out, records)
        except ConditioningError as exc:
            print(f"conditioning error: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        except OSError as exc:
            print(f"i/o error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote {args.out}")
        return EXIT_OK

    # run
    try:
        report = run(config, args.out, exact=args.exact, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConditioningError, DataInconsistencyError, OverflowError,
            FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"run complete: fidelity={report.get('fidelity', float('nan')):.6f} "
          f"({args.out})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
