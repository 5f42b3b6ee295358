"""CSV / JSON persistence for measurement sets, density matrices, and
quasiprobability grids.

All floats are written with repr-level precision (%.17g), which
round-trips IEEE doubles bit-exactly; readers and writers are inverse
maps on the supported types.
"""

import csv
import json

import numpy as np

from .forward import PhaseScanSet, RotationSetting, SpinMarginalSet
from .quasiprob import QuasiprobGrid
from .states import DensityMatrix

_F = "%.17g"


def _fmt(x):
    return _F % float(x)


def _meta_line(kind, **kv):
    parts = [f"kind={kind}"] + [f"{k}={v}" for k, v in kv.items()]
    return "# " + " ".join(parts)


def _parse_meta(line):
    if not line.startswith("#"):
        raise ValueError(f"missing metadata header, got {line!r}")
    meta = {}
    for tok in line.lstrip("#").split():
        k, _, v = tok.partition("=")
        meta[k] = v
    return meta


def write_spin_marginals(path, data):
    with open(path, "w", newline="") as fh:
        fh.write(
            _meta_line(
                "spin_marginal",
                j=data.j,
                runs=data.runs if data.runs is not None else "exact",
                seed=data.seed,
                noise_model=data.noise_model,
            )
            + "\n"
        )
        w = csv.writer(fh)
        dim = data.probs.shape[1]
        w.writerow(["theta", "phi"] + [f"w{m}" for m in range(dim)])
        for setting, row in zip(data.settings, data.probs):
            w.writerow([_fmt(setting.theta), _fmt(setting.phi)] + [_fmt(v) for v in row])


def read_spin_marginals(path):
    with open(path, newline="") as fh:
        meta = _parse_meta(fh.readline())
        if meta["kind"] != "spin_marginal":
            raise ValueError(f"not a spin marginal file: {path}")
        r = csv.reader(fh)
        next(r)  # column header
        settings, rows = [], []
        for rec in r:
            settings.append(RotationSetting(float(rec[0]), float(rec[1])))
            rows.append([float(v) for v in rec[2:]])
    runs = None if meta["runs"] == "exact" else int(meta["runs"])
    seed = None if meta["seed"] == "None" else int(meta["seed"])
    return SpinMarginalSet(
        j=float(meta["j"]), settings=settings, probs=np.array(rows),
        runs=runs, seed=seed, noise_model=meta["noise_model"],
    )


def write_phase_scan(path, scan):
    with open(path, "w", newline="") as fh:
        fh.write(
            _meta_line(
                "phase_scan",
                beta_abs=_fmt(scan.beta_abs),
                eta=_fmt(scan.eta),
                runs=scan.runs if scan.runs is not None else "exact",
                seed=scan.seed,
                noise_model=scan.noise_model,
                random_phase=int(scan.random_phase),
            )
            + "\n"
        )
        w = csv.writer(fh)
        w.writerow(["phase"] + [f"w{n}" for n in range(scan.probs.shape[1])])
        for phase, row in zip(scan.phases, scan.probs):
            w.writerow([_fmt(phase)] + [_fmt(v) for v in row])


def read_phase_scan(path):
    with open(path, newline="") as fh:
        meta = _parse_meta(fh.readline())
        if meta["kind"] != "phase_scan":
            raise ValueError(f"not a phase scan file: {path}")
        r = csv.reader(fh)
        next(r)
        phases, rows = [], []
        for rec in r:
            phases.append(float(rec[0]))
            rows.append([float(v) for v in rec[1:]])
    runs = None if meta["runs"] == "exact" else int(meta["runs"])
    seed = None if meta["seed"] == "None" else int(meta["seed"])
    return PhaseScanSet(
        beta_abs=float(meta["beta_abs"]), phases=np.array(phases),
        probs=np.array(rows), eta=float(meta["eta"]), runs=runs, seed=seed,
        noise_model=meta["noise_model"], random_phase=bool(int(meta["random_phase"])),
    )


def write_density_matrix(path, rho):
    """Two CSV blocks (real part, then imaginary part) with a metadata header."""
    with open(path, "w", newline="") as fh:
        fh.write(_meta_line("density_matrix", basis=rho.basis, dim=rho.dim) + "\n")
        w = csv.writer(fh)
        for row in rho.entries.real:
            w.writerow([_fmt(v) for v in row])
        fh.write("# imag\n")
        for row in rho.entries.imag:
            w.writerow([_fmt(v) for v in row])


def read_density_matrix(path):
    with open(path, newline="") as fh:
        meta = _parse_meta(fh.readline())
        if meta["kind"] != "density_matrix":
            raise ValueError(f"not a density matrix file: {path}")
        dim = int(meta["dim"])
        real_rows, imag_rows = [], []
        target = real_rows
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                target = imag_rows
                continue
            target.append([float(v) for v in line.split(",")])
    entries = np.array(real_rows) + 1j * np.array(imag_rows)
    if entries.shape != (dim, dim):
        raise ValueError(f"density matrix block shape {entries.shape} != ({dim},{dim})")
    return DensityMatrix(entries, basis=meta["basis"])


def write_quasiprob(path, grid, long_format=False):
    with open(path, "w", newline="") as fh:
        fh.write(
            _meta_line("quasiprob", grid_kind=grid.kind,
                       n1=len(grid.axis1), n2=len(grid.axis2),
                       long=int(long_format)) + "\n"
        )
        w = csv.writer(fh)
        if long_format:
            w.writerow(["x", "y", "value"])
            for i, x in enumerate(grid.axis1):
                for k, y in enumerate(grid.axis2):
                    w.writerow([_fmt(x), _fmt(y), _fmt(grid.values[i, k])])
        else:
            w.writerow([""] + [_fmt(y) for y in grid.axis2])
            for i, x in enumerate(grid.axis1):
                w.writerow([_fmt(x)] + [_fmt(v) for v in grid.values[i]])


def read_quasiprob(path):
    with open(path, newline="") as fh:
        meta = _parse_meta(fh.readline())
        if meta["kind"] != "quasiprob":
            raise ValueError(f"not a quasiprob file: {path}")
        r = csv.reader(fh)
        if int(meta.get("long", 0)):
            next(r)
            xs, ys, vals = [], [], {}
            for rec in r:
                x, y, v = float(rec[0]), float(rec[1]), float(rec[2])
                if x not in xs:
                    xs.append(x)
                if y not in ys:
                    ys.append(y)
                vals[(x, y)] = v
            values = np.array([[vals[(x, y)] for y in ys] for x in xs])
            return QuasiprobGrid(kind=meta["grid_kind"], axis1=np.array(xs),
                                 axis2=np.array(ys), values=values)
        header = next(r)
        axis2 = np.array([float(v) for v in header[1:]])
        axis1, rows = [], []
        for rec in r:
            axis1.append(float(rec[0]))
            rows.append([float(v) for v in rec[1:]])
        return QuasiprobGrid(kind=meta["grid_kind"], axis1=np.array(axis1),
                             axis2=axis2, values=np.array(rows))


def write_beta_tradeoff(path, records):
    """Long-format CSV (beta, element, std_err, ...) of a tradeoff report."""
    with open(path, "w", newline="") as fh:
        fh.write(_meta_line("beta_tradeoff") + "\n")
        w = csv.writer(fh)
        w.writerow(["beta", "row", "col", "mean_abs_error", "std_err",
                    "std_err_of_mean", "cond_s"])
        for rec in records:
            w.writerow(
                [_fmt(rec["beta"]), rec["row"], rec["col"],
                 _fmt(rec["mean_abs_error"]), _fmt(rec["std_err"]),
                 _fmt(rec["std_err_of_mean"]), _fmt(rec["cond_s"])]
            )


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
