"""Command-line front end.

Subcommands::

    singular-bie solve --config run.cfg
    singular-bie verify --suite {specfun,gauss-flux,jumps,eigen,plane-identity}
    singular-bie convergence --config run.cfg --levels 3

Exit status: 0 success, 1 a verification check failed, 2 configuration
error, 3 solver error.

Config files hold one ``section.key = value`` per line; ``#`` starts a
comment.  Recognised keys (defaults in brackets)::

    problem.alpha         0 < 2*alpha < 1                       (required)
    problem.kind          dirichlet | holmgren                  (required)
    problem.solution      builtin exact solution, sets both data sets:
                          zero | one | x-power |
                          q1-exterior(x0,y0,z0) | q2-exterior(x0,y0,z0)
    problem.surface_data  number, or CSV file with columns s,t,phi
    problem.plane_data    number, or CSV file with columns r,phi,value
    domain.radius         hemisphere radius                     [1.0]
    domain.surface_table  CSV file with columns s,t,x,y,z (replaces the hemisphere)
    grid.ns, grid.nt      surface nodes                         [32, 32]
    grid.nr, grid.nphi    disk nodes                            [48, 64]
    solver.method         bie | poisson                         [bie]
    evaluation.points     "x y z; x y z; ..."
    evaluation.points_file CSV file with columns x,y,z
    evaluation.lattice    n: cell centres of an n^3 lattice within 0.8 of the rim radius
    output.path           result CSV                            [solution.csv]

Relative file paths are resolved against the config file's directory.
``surface_data`` / ``plane_data`` override the data implied by ``solution``.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from .bvp import BvpProblem, SurfaceData, _inside, evaluate_solution, solve
from .exceptions import SingularBIEError, SingularSystemError
from .geometry import make_hemisphere, make_tabulated_surface
from .hemisphere import HalfBall, poisson_dirichlet, poisson_holmgren
from .kernels import SingularityParams, q1, q2
from .potentials import PlaneData
from .verification import SUITES, run_suite

__all__ = ["ConfigError", "RunConfig", "Builtin", "parse_config", "load_config", "builtin_solution", "main"]

KNOWN_KEYS = {
    "problem": {"alpha", "kind", "solution", "surface_data", "plane_data"},
    "domain": {"radius", "surface_table"},
    "grid": {"ns", "nt", "nr", "nphi"},
    "solver": {"method"},
    "evaluation": {"points", "points_file", "lattice"},
    "output": {"path"},
}
LATTICE_SCALE = 0.8


class ConfigError(ValueError):
    """Invalid or unreadable configuration (exit status 2)."""


# --------------------------------------------------------------------------
# builtin exact solutions


@dataclass(frozen=True)
class Builtin:
    """Exact solution u* with its surface trace and plane data for either problem."""

    name: str
    u: Callable  # (n, 3) -> (n,)
    tau1: Callable  # (y, z) -> trace at x = 0
    nu1: Callable  # (y, z) -> lim x^(2 alpha) u_x at x = 0


def _const_yz(c):
    return lambda y, z: np.full(np.broadcast(y, z).shape, float(c))


def _on_plane(f, x):
    def g(y, z):
        y, z = np.broadcast_arrays(np.asarray(y, float), np.asarray(z, float))
        pts = np.column_stack([np.full(y.size, x), y.ravel(), z.ravel()])
        return np.asarray(f(pts), float).reshape(y.shape)

    return g


def builtin_solution(text: str, alpha: float) -> Builtin:
    """Parse a builtin name such as ``q2-exterior(2.5, 0, 0)``."""
    sp = SingularityParams.coerce(alpha)
    m = re.fullmatch(r"\s*([a-z0-9-]+)\s*(?:\((.*)\))?\s*", text)
    if not m:
        raise ConfigError(f"cannot parse builtin solution {text!r}")
    name, args = m.group(1), m.group(2)
    if name in ("zero", "one", "x-power"):
        if args is not None:
            raise ConfigError(f"builtin {name!r} takes no arguments")
        if name == "zero":
            return Builtin(name, lambda p: np.zeros(len(p)), _const_yz(0.0), _const_yz(0.0))
        if name == "one":
            return Builtin(name, lambda p: np.ones(len(p)), _const_yz(1.0), _const_yz(0.0))
        e = 1.0 - 2.0 * sp.alpha
        return Builtin(name, lambda p: np.asarray(p)[:, 0] ** e, _const_yz(0.0), _const_yz(e))
    if name in ("q1-exterior", "q2-exterior"):
        try:
            src = np.array([float(v) for v in (args or "").split(",")])
        except ValueError:
            raise ConfigError(f"bad source coordinates in {text!r}") from None
        if src.shape != (3,):
            raise ConfigError(f"{name} needs three source coordinates (x0,y0,z0)")
        if not src[0] > 0:
            raise ConfigError(f"{name} source must have x0 > 0, got {src[0]:g}")
        if name == "q1-exterior":
            u = lambda p: q1(np.asarray(p, float), src, sp)
            # q1 is even in x near the plane, so x^(2 alpha) u_x -> 0
            return Builtin(f"{name}", u, _on_plane(u, 0.0), _const_yz(0.0))
        u = lambda p: q2(np.asarray(p, float), src, sp)
        e = 1.0 - 2.0 * sp.alpha
        h = 1e-6

        def nu1(y, z):
            # x^(2a) u_x = e u / x^e + O(x); linear extrapolation to x = 0
            f1 = _on_plane(u, h)(y, z) / h**e
            f2 = _on_plane(u, 2 * h)(y, z) / (2 * h) ** e
            return e * (2.0 * f1 - f2)

        return Builtin(name, u, _const_yz(0.0), nu1)
    raise ConfigError(
        f"unknown builtin {name!r}; use zero, one, x-power, q1-exterior(x0,y0,z0) or q2-exterior(x0,y0,z0)"
    )


# --------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    alpha: float
    kind: str
    radius: float = 1.0
    surface_table: Optional[Path] = None
    solution: Optional[str] = None
    surface_data: Optional[str] = None
    plane_data: Optional[str] = None
    ns: int = 32
    nt: int = 32
    nr: int = 48
    nphi: int = 64
    method: str = "bie"
    points: Optional[np.ndarray] = None
    lattice: Optional[int] = None
    output: Path = Path("solution.csv")
    base_dir: Path = field(default_factory=Path.cwd)


def parse_config(text: str) -> Dict[str, str]:
    """Flat ``section.key = value`` pairs; later keys override earlier ones."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        section, _, name = key.partition(".")
        if not name or name not in KNOWN_KEYS.get(section, ()):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _num(raw, key, cast=float):
    try:
        return cast(raw[key])
    except ValueError:
        raise ConfigError(f"{key} = {raw[key]!r} is not a valid {cast.__name__}") from None


def _read_csv(path: Path, columns):
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if data.shape[1] != columns:
        raise ConfigError(f"{path}: expected {columns} columns, got {data.shape[1]}")
    return data


def _grid_table(data, path):
    """Rows (u, v, values...) on a full rectangular (u, v) grid -> nodes and array."""
    u, v = np.unique(data[:, 0]), np.unique(data[:, 1])
    if u.size * v.size != data.shape[0]:
        raise ConfigError(f"{path}: rows do not form a full rectangular grid")
    order = np.lexsort((data[:, 1], data[:, 0]))
    vals = data[order, 2:].reshape(u.size, v.size, -1)
    return u, v, vals


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = parse_config(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for key in ("problem.alpha", "problem.kind"):
        if key not in raw:
            raise ConfigError(f"missing required key {key}")
    cfg = RunConfig(alpha=_num(raw, "problem.alpha"), kind=raw["problem.kind"].lower(), base_dir=path.parent)
    try:
        SingularityParams.coerce(cfg.alpha)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.kind not in ("dirichlet", "holmgren"):
        raise ConfigError(f"problem.kind must be dirichlet or holmgren, got {cfg.kind!r}")
    cfg.solution = raw.get("problem.solution")
    cfg.surface_data = raw.get("problem.surface_data")
    cfg.plane_data = raw.get("problem.plane_data")
    if cfg.solution is None and cfg.surface_data is None:
        raise ConfigError("set problem.solution or problem.surface_data")
    if cfg.solution is not None:
        builtin_solution(cfg.solution, cfg.alpha)  # validate early
    if "domain.radius" in raw:
        cfg.radius = _num(raw, "domain.radius")
        if not cfg.radius > 0:
            raise ConfigError(f"domain.radius must be positive, got {cfg.radius:g}")
    if "domain.surface_table" in raw:
        cfg.surface_table = cfg.base_dir / raw["domain.surface_table"]
    for key in ("ns", "nt", "nr", "nphi"):
        if f"grid.{key}" in raw:
            n = _num(raw, f"grid.{key}", int)
            if n < 4:
                raise ConfigError(f"grid.{key} must be >= 4, got {n}")
            setattr(cfg, key, n)
    cfg.method = raw.get("solver.method", "bie").lower()
    if cfg.method not in ("bie", "poisson"):
        raise ConfigError(f"solver.method must be bie or poisson, got {cfg.method!r}")
    if cfg.method == "poisson" and cfg.surface_table is not None:
        raise ConfigError("solver.method = poisson needs the hemisphere domain")

    pts = []
    if "evaluation.points" in raw:
        try:
            rows = [[float(v) for v in chunk.replace(",", " ").split()] for chunk in raw["evaluation.points"].split(";") if chunk.strip()]
            arr = np.array(rows, float)
        except ValueError:
            raise ConfigError("evaluation.points must be 'x y z; x y z; ...'") from None
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ConfigError("evaluation.points entries need three coordinates")
        pts.append(arr)
    if "evaluation.points_file" in raw:
        pts.append(_read_csv(cfg.base_dir / raw["evaluation.points_file"], 3))
    if "evaluation.lattice" in raw:
        cfg.lattice = _num(raw, "evaluation.lattice", int)
        if cfg.lattice < 1:
            raise ConfigError("evaluation.lattice must be >= 1")
    if pts:
        cfg.points = np.vstack(pts)
    if cfg.points is None and cfg.lattice is None:
        raise ConfigError("no evaluation points: set evaluation.points, points_file or lattice")
    if "output.path" in raw:
        cfg.output = cfg.base_dir / raw["output.path"]
    else:
        cfg.output = cfg.base_dir / cfg.output
    return cfg


def lattice_points(n, radius):
    """Cell centres of an n^3 lattice on [0, R] x [-R, R]^2 kept inside |p| < R."""
    R = LATTICE_SCALE * radius
    xs = (np.arange(n) + 0.5) * R / n
    ys = -R + (np.arange(n) + 0.5) * 2 * R / n
    P = np.stack(np.meshgrid(xs, ys, ys, indexing="ij"), axis=-1).reshape(-1, 3)
    return P[np.linalg.norm(P, axis=1) < R]


# --------------------------------------------------------------------------
# running


def _surface(cfg):
    if cfg.surface_table is None:
        return make_hemisphere(cfg.radius)
    s, t, xyz = _grid_table(_read_csv(cfg.surface_table, 5), cfg.surface_table)
    return make_tabulated_surface(s, t, xyz)


def _problem(cfg, surface, ns, nt):
    builtin = builtin_solution(cfg.solution, cfg.alpha) if cfg.solution else None
    if cfg.surface_data is not None:
        phi = _data_value(cfg, cfg.surface_data, surface=True)
    else:
        phi = builtin.u
    if cfg.plane_data is not None:
        plane = _data_value(cfg, cfg.plane_data, surface=False)
    elif builtin is not None:
        plane = PlaneData(builtin.tau1 if cfg.kind == "dirichlet" else builtin.nu1)
    else:
        plane = 0.0
    return builtin, BvpProblem(
        cfg.alpha, surface, cfg.kind, phi, plane, n_s=ns, n_t=nt, n_r=cfg.nr, n_phi=cfg.nphi
    )


def _data_value(cfg, value, surface):
    try:
        return float(value)
    except ValueError:
        pass
    path = cfg.base_dir / value
    data = _read_csv(path, 3)
    u, v, vals = _grid_table(data, path)
    if surface:
        return SurfaceData.from_table(u, v, vals[..., 0])
    return PlaneData.from_polar_table(u, v, vals[..., 0])


def _evaluation_points(cfg, surface):
    parts = []
    if cfg.points is not None:
        parts.append(cfg.points)
    if cfg.lattice is not None:
        parts.append(lattice_points(cfg.lattice, surface.rim_radius))
    P = np.vstack(parts)
    if P.shape[0] == 0:
        raise ConfigError("no evaluation points inside the domain")
    if np.any(P[:, 0] <= 0):
        raise ConfigError("evaluation points must have x > 0")
    if cfg.surface_table is None and np.any(np.linalg.norm(P, axis=1) >= cfg.radius):
        raise ConfigError(f"evaluation points must lie strictly inside the half-ball of radius {cfg.radius:g}")
    return P


def run(cfg: RunConfig, ns=None, nt=None):
    """Solve the configured problem; returns (points, u, builtin or None)."""
    surface = _surface(cfg)
    P = _evaluation_points(cfg, surface)
    builtin, problem = _problem(cfg, surface, ns or cfg.ns, nt or cfg.nt)
    if cfg.method == "poisson":
        hb = HalfBall(cfg.radius, problem.n_s, problem.n_t, cfg.nr, cfg.nphi)
        fn = poisson_dirichlet if cfg.kind == "dirichlet" else poisson_holmgren
        u = np.atleast_1d(fn(hb, problem.plane_data, problem.phi, P, problem.sp))
    else:
        sol = solve(problem)
        if cfg.surface_table is not None and not np.all(_inside(sol, P)):
            raise ConfigError("evaluation points must lie strictly inside the domain")
        u = np.atleast_1d(evaluate_solution(sol, P, check_domain=False))
    return P, u, builtin


def write_csv(path, header, rows, fmt="%.15g"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt=fmt, newline="\n", encoding="utf-8")


def cmd_solve(args):
    cfg = load_config(args.config)
    P, u, _ = run(cfg)
    write_csv(cfg.output, "x,y,z,u", np.column_stack([P, u]))
    print(f"wrote {len(u)} rows to {cfg.output}")
    return 0


def cmd_convergence(args):
    if args.levels < 2:
        raise ConfigError(f"--levels must be >= 2, got {args.levels}")
    cfg = load_config(args.config)
    if cfg.solution is None or cfg.surface_data is not None or cfg.plane_data is not None:
        raise ConfigError("convergence needs a builtin manufactured solution (problem.solution) without data overrides")
    rows = []
    for level in range(1, args.levels + 1):
        n = 8 * (level + 1)
        t0 = time.perf_counter()
        P, u, builtin = run(cfg, n, n)
        exact = builtin.u(P)
        err = np.abs(u - exact).max() / max(np.abs(exact).max(), 1e-300)
        rows.append([level, n, n, err, time.perf_counter() - t0])
        print(f"level {level}: Ns=Nt={n} max_rel_err={err:.3e}")
    path = cfg.output
    write_csv(path, "level,Ns,Nt,max_rel_err,runtime_s", rows, fmt=["%d", "%d", "%d", "%.15g", "%.6g"])
    print(f"wrote {path}")
    return 0


def cmd_verify(args):
    checks = run_suite(args.suite)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{args.suite}: {len(checks) - failed}/{len(checks)} passed")
    return 0 if failed == 0 else 1


def build_parser():
    p = argparse.ArgumentParser(prog="singular-bie", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="solve a configured problem and write u at the evaluation points")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_solve)
    v = sub.add_parser("verify", help="run a self-check suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES))
    v.set_defaults(func=cmd_verify)
    c = sub.add_parser("convergence", help="error table over grid levels N = 8 (level + 1)")
    c.add_argument("--config", required=True)
    c.add_argument("--levels", required=True, type=int)
    c.set_defaults(func=cmd_convergence)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit with 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SingularSystemError as exc:
        cond = "unknown" if exc.condition is None else f"{exc.condition:.3e}"
        print(f"solver error: {exc} (condition estimate {cond})", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SingularBIEError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {exc} (condition estimate unknown)", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
