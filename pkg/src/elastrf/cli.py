"""Command-line interface.

Subcommands: groups, basis, validate, kernel, simulate, estimate.
Exit codes: 0 success, 1 validation or statistical-gate failure, 2 usage,
parse, or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys

import numpy as np

from . import config, covariance, estimate, groups, reps, simulate

BIN_MAGIC = b"ETRF"
BIN_VERSION = 1


def _out_stream(path):
    return open(path, "w") if path else sys.stdout


def _load_spec(path):
    with open(path) as fh:
        return config.parse_config(fh.read())


def _load_pairs(path):
    rows = np.loadtxt(path, ndmin=2)
    if rows.shape[1] != 6:
        raise ValueError("pairs file needs six columns: x1 x2 x3 y1 y2 y3")
    return [(row[:3], row[3:]) for row in rows]


def cmd_groups(args):
    tags = [args.group] if args.group else list(groups.GROUP_TAGS)
    with _out_stream(args.out) as fh:
        for tag in tags:
            case = groups.group_case(tag)
            strata = groups.orbit_strata(tag)
            iso = groups.isotropy_subgroups(tag)
            fh.write(f"{tag} {case.name}\n")
            fh.write(f"  class: {case.class_name} (dim {case.class_dim})\n")
            order = case.order if case.finite else "infinite"
            fh.write(f"  order: {order}\n")
            s = reps.structure_summary(tag)
            fh.write("  structure: " + " + ".join(
                f"{m}{lab}" for lab, m in s.items()) + "\n")
            for st, h in zip(strata, iso):
                ho = h.order if h.order is not None else "inf"
                fh.write(f"  stratum {st.index}: {st.chart} "
                         f"[isotropy {h.label}, order {ho}]\n")
    return 0


def cmd_basis(args):
    comps = reps.isotypic_decomposition(args.group)
    with _out_stream(args.out) as fh:
        fh.write("irrep,copy,row,"
                 + ",".join(f"c{i + 1}" for i in range(21)) + "\n")
        for c in comps:
            for n in range(c.copies):
                for a in range(c.dim):
                    vals = ",".join(np.format_float_scientific(
                        v, precision=16, trim="-") for v in c.vectors[n, a])
                    fh.write(f"{c.irrep},{n + 1},{a + 1},{vals}\n")
    return 0


def cmd_validate(args):
    spec, plan = _load_spec(args.spec)
    report = spec.validate()
    if args.dump_config:
        with _out_stream(args.out) as fh:
            fh.write(config.dump_config(spec, plan))
    if report.ok:
        print("valid", file=sys.stderr)
        return 0
    for v in report.violations:
        print(str(v), file=sys.stderr)
    return 1


def cmd_kernel(args):
    spec, _ = _load_spec(args.spec)
    report = spec.validate()
    if not report.ok:
        print(str(report), file=sys.stderr)
        return 1
    pairs = _load_pairs(args.pairs)
    with _out_stream(args.out) as fh:
        fh.write("pair,row,col,value\n")
        for k, (x, y) in enumerate(pairs):
            K = covariance.kernel(spec, x, y)
            for i in range(K.shape[0]):
                for j in range(K.shape[1]):
                    fh.write(f"{k},{i + 1},{j + 1},"
                             + np.format_float_scientific(
                                 K[i, j], precision=16, trim="-") + "\n")
    return 0


def _write_binary(path, field):
    n, d = field.coords.shape
    with open(path, "wb") as fh:
        fh.write(BIN_MAGIC)
        fh.write(struct.pack("<IIQ", BIN_VERSION, d, n))
        fh.write(field.coords.astype("<f8").tobytes())
    meta = {
        "group": field.tag,
        "seed": field.seed,
        "lmax": field.lmax,
        "spec_sha256_16": field.spec_hash,
        "points": n,
        "components": d,
        "layout": "grid-major: for each grid point, its d components",
        "grid": field.grid.tolist(),
    }
    with open(path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)


def read_binary(path):
    """Inverse of the binary writer: returns (d, coords array)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != BIN_MAGIC:
            raise ValueError("not an elastrf binary field file")
        version, d, n = struct.unpack("<IIQ", fh.read(16))
        if version != BIN_VERSION:
            raise ValueError(f"unsupported version {version}")
        data = np.frombuffer(fh.read(8 * d * n), dtype="<f8")
    return d, data.reshape(n, d)


def cmd_simulate(args):
    spec, plan_dict = _load_spec(args.spec)
    report = spec.validate()
    if not report.ok:
        print(str(report), file=sys.stderr)
        return 1
    grid = config.parse_grid(args.grid) if args.grid else None
    plan = config.plan_from_dict(plan_dict, grid=grid, seed=args.seed,
                                 lmax=args.lmax)
    field = simulate.sample_field(spec, plan)
    if args.format == "bin":
        if not args.out:
            print("binary output needs --out", file=sys.stderr)
            return 2
        _write_binary(args.out, field)
    else:
        with _out_stream(args.out) as fh:
            d = field.coords.shape[1]
            fh.write("x1,x2,x3," + ",".join(f"c{i + 1}" for i in range(d)) + "\n")
            for p, row in zip(field.grid, field.coords):
                fh.write(",".join(np.format_float_scientific(
                    v, precision=16, trim="-") for v in (*p, *row)) + "\n")
    return 0


def cmd_estimate(args):
    spec, plan_dict = _load_spec(args.spec)
    report = spec.validate()
    if not report.ok:
        print(str(report), file=sys.stderr)
        return 1
    pairs = _load_pairs(args.pairs)
    plan = config.plan_from_dict(plan_dict, grid=np.zeros((1, 3)),
                                 seed=args.seed, lmax=args.lmax)
    rep = estimate.mc_estimate(spec, plan, args.n, pairs)
    with _out_stream(args.out) as fh:
        fh.write("block,row,col,estimate,target,stderr,z\n")
        for i in range(rep.mean_estimate.shape[1]):
            fh.write(f"mean,{i + 1},0,{rep.mean_estimate[0, i]!r},"
                     f"{rep.mean_target[i]!r},{rep.mean_stderr[0, i]!r},"
                     f"{rep.mean_z[0, i]!r}\n")
        for k, pe in enumerate(rep.pairs):
            for i in range(pe.z.shape[0]):
                for j in range(pe.z.shape[1]):
                    fh.write(f"pair{k},{i + 1},{j + 1},{pe.estimate[i, j]!r},"
                             f"{pe.target[i, j]!r},{pe.stderr[i, j]!r},"
                             f"{pe.z[i, j]!r}\n")
    print(f"z_max = {rep.z_max:.3f} over {rep.n} realizations",
          file=sys.stderr)
    return 0 if rep.passes() else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="elastrf",
                                 description="random fields of elasticity tensors")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("groups", help="group-case metadata")
    g.add_argument("--group")
    g.add_argument("--out")
    g.set_defaults(func=cmd_groups)

    b = sub.add_parser("basis", help="dump an adapted basis as CSV")
    b.add_argument("--group", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_basis)

    v = sub.add_parser("validate", help="validate a field specification")
    v.add_argument("--spec", required=True)
    v.add_argument("--dump-config", action="store_true")
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    k = sub.add_parser("kernel", help="two-point kernels at point pairs")
    k.add_argument("--spec", required=True)
    k.add_argument("--pairs", required=True)
    k.add_argument("--out")
    k.set_defaults(func=cmd_kernel)

    s = sub.add_parser("simulate", help="sample one realization")
    s.add_argument("--spec", required=True)
    s.add_argument("--grid")
    s.add_argument("--seed", type=int)
    s.add_argument("--lmax", type=int)
    s.add_argument("--out")
    s.add_argument("--format", choices=("csv", "bin"), default="csv")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="Monte Carlo verification")
    e.add_argument("--spec", required=True)
    e.add_argument("--pairs", required=True)
    e.add_argument("--n", type=int, default=2000)
    e.add_argument("--seed", type=int)
    e.add_argument("--lmax", type=int)
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (config.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
