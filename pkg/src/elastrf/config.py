"""Line-oriented specification files.

Grammar (tokens are whitespace-separated; `#` starts a comment):

    group <K1..K16>
    mean <m floats>                      # trivial-copy coefficients
    atom                                 # repeated
      p <x> <y> <z>                      # wavevector, or
      lambda <r>                         #   shorthand for p = (0, 0, r)
      weight <w>
      f                                  # d rows follow
        row <d floats>
        ...
      u <29 floats>                      # K2 alternative to f
    end
    plan                                 # optional
      seed <int>
      lmax <int>
      tail_tol <float>
      grid lattice:<nx>,<ny>,<nz>,<h>    # or: grid file:<path>
    end

All numbers are emitted with 17 significant digits so a dump re-parses to an
identical specification.
"""

from __future__ import annotations

import numpy as np

from . import covariance, reps, simulate


class ConfigError(ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _fmt(x):
    return np.format_float_scientific(float(x), precision=16, trim="-")


def _tokens(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_config(text):
    """Parse a specification file into (FieldSpec, plan dict).

    The plan dict holds whatever plan keys were present (seed, lmax,
    tail_tol, grid); missing keys fall back to SimulationPlan defaults.
    """
    tag = None
    mean = None
    atoms = []
    plan = {}
    lines = list(_tokens(text))
    i = 0

    def need_float(no, tok):
        try:
            return float(tok)
        except ValueError:
            raise ConfigError(no, f"expected a number, got {tok!r}") from None

    while i < len(lines):
        no, toks = lines[i]
        key = toks[0]
        if key == "group":
            if len(toks) != 2:
                raise ConfigError(no, "group takes one tag")
            tag = toks[1]
            try:
                reps.adapted_basis(tag)
            except KeyError:
                raise ConfigError(no, f"unknown group tag {tag!r}") from None
            i += 1
        elif key == "mean":
            mean = np.array([need_float(no, t) for t in toks[1:]])
            i += 1
        elif key == "atom":
            if tag is None:
                raise ConfigError(no, "atom before group")
            i += 1
            p = None
            weight = None
            f = None
            u = None
            d = reps.adapted_basis(tag).shape[0]
            while i < len(lines):
                no2, t2 = lines[i]
                if t2[0] == "end":
                    i += 1
                    break
                if t2[0] == "p":
                    if len(t2) != 4:
                        raise ConfigError(no2, "p takes three components")
                    p = np.array([need_float(no2, v) for v in t2[1:]])
                    i += 1
                elif t2[0] == "lambda":
                    if len(t2) != 2:
                        raise ConfigError(no2, "lambda takes one value")
                    p = np.array([0.0, 0.0, need_float(no2, t2[1])])
                    i += 1
                elif t2[0] == "weight":
                    weight = need_float(no2, t2[1])
                    i += 1
                elif t2[0] == "u":
                    if len(t2) != 30:
                        raise ConfigError(no2, "u takes 29 values")
                    u = np.array([need_float(no2, v) for v in t2[1:]])
                    i += 1
                elif t2[0] == "f":
                    i += 1
                    rows = []
                    while i < len(lines) and lines[i][1][0] == "row":
                        no3, t3 = lines[i]
                        if len(t3) != d + 1:
                            raise ConfigError(no3, f"row takes {d} values")
                        rows.append([need_float(no3, v) for v in t3[1:]])
                        i += 1
                    if len(rows) != d:
                        raise ConfigError(no2, f"f needs {d} rows, got {len(rows)}")
                    f = np.array(rows)
                else:
                    raise ConfigError(no2, f"unknown atom key {t2[0]!r}")
            else:
                raise ConfigError(no, "atom block not closed with 'end'")
            if p is None:
                raise ConfigError(no, "atom needs p or lambda")
            if weight is None:
                raise ConfigError(no, "atom needs a weight")
            if u is not None:
                if tag != "K2":
                    raise ConfigError(no, "u coordinates only apply to K2")
                if f is not None:
                    raise ConfigError(no, "give either f or u, not both")
                f = covariance.f_from_u(u)
            if f is None:
                raise ConfigError(no, "atom needs f rows (or u for K2)")
            atoms.append(covariance.SpectralAtom(p, weight, f))
        elif key == "plan":
            i += 1
            while i < len(lines):
                no2, t2 = lines[i]
                if t2[0] == "end":
                    i += 1
                    break
                if t2[0] == "seed":
                    plan["seed"] = int(t2[1])
                elif t2[0] == "lmax":
                    plan["lmax"] = int(t2[1])
                elif t2[0] == "tail_tol":
                    plan["tail_tol"] = need_float(no2, t2[1])
                elif t2[0] == "grid":
                    plan["grid"] = t2[1]
                else:
                    raise ConfigError(no2, f"unknown plan key {t2[0]!r}")
                i += 1
            else:
                raise ConfigError(no, "plan block not closed with 'end'")
        else:
            raise ConfigError(no, f"unknown key {key!r}")
    if tag is None:
        raise ConfigError(0, "missing 'group' line")
    m = reps.trivial_multiplicity(tag)
    if mean is None:
        mean = np.zeros(m)
    if mean.shape != (m,):
        raise ConfigError(0, f"mean needs {m} coefficients for {tag}, "
                          f"got {len(mean)}")
    return covariance.FieldSpec(tag, mean, atoms), plan


def dump_config(spec, plan=None):
    """Canonical text form; parse_config(dump_config(s)) reproduces s."""
    out = ["# elastrf field specification", f"group {spec.tag}",
           "mean " + " ".join(_fmt(c) for c in spec.mean)]
    for atom in spec.atoms:
        out.append("atom")
        out.append("  p " + " ".join(_fmt(v) for v in atom.p))
        out.append(f"  weight {_fmt(atom.weight)}")
        out.append("  f")
        for row in atom.f:
            out.append("    row " + " ".join(_fmt(v) for v in row))
        out.append("end")
    if plan:
        out.append("plan")
        for k in ("seed", "lmax"):
            if k in plan:
                out.append(f"  {k} {plan[k]}")
        if "tail_tol" in plan:
            out.append(f"  tail_tol {_fmt(plan['tail_tol'])}")
        if "grid" in plan:
            out.append(f"  grid {plan['grid']}")
        out.append("end")
    return "\n".join(out) + "\n"


def parse_grid(text):
    """Grid description: `lattice:nx,ny,nz,h`, `file:<path>`, or a bare path."""
    if text.startswith("lattice:"):
        try:
            nx, ny, nz, h = text[len("lattice:"):].split(",")
            nx, ny, nz, h = int(nx), int(ny), int(nz), float(h)
        except ValueError:
            raise ValueError(f"bad lattice spec {text!r}; "
                             "expected lattice:nx,ny,nz,h") from None
        axes = [np.arange(n) * h for n in (nx, ny, nz)]
        g = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return g.reshape(-1, 3)
    path = text[len("file:"):] if text.startswith("file:") else text
    pts = np.loadtxt(path, ndmin=2)
    if pts.shape[1] != 3:
        raise ValueError(f"grid file {path!r} must have three columns")
    return pts


def plan_from_dict(plan_dict, grid=None, **overrides):
    kw = {}
    if "seed" in plan_dict:
        kw["seed"] = plan_dict["seed"]
    if "lmax" in plan_dict:
        kw["lmax"] = plan_dict["lmax"]
    if "tail_tol" in plan_dict:
        kw["tail_tol"] = plan_dict["tail_tol"]
    kw.update({k: v for k, v in overrides.items() if v is not None})
    if grid is None:
        if "grid" not in plan_dict:
            raise ValueError("no grid given on the command line or in the plan")
        grid = parse_grid(plan_dict["grid"])
    return simulate.SimulationPlan(grid, **kw)
