import numpy as np
import pytest
from numpy.testing import assert_allclose

from singular_bie import q2
from singular_bie.kernels import grad_q_field
from singular_bie.cli import ConfigError, builtin_solution, lattice_points, main, parse_config

SRC = (2.5, 0.3, -0.2)
BASE = """\
# manufactured Dirichlet problem
problem.alpha = 0.25
problem.kind = {kind}
problem.solution = {solution}
grid.ns = 16
grid.nt = 16
evaluation.points = 0.3 0.1 0.2; 0.5 0 0; 0.1 -0.4 0.3
output.path = out.csv
"""


def _write(tmp_path, kind="dirichlet", solution="q2-exterior(2.5, 0.3, -0.2)", extra=""):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(BASE.format(kind=kind, solution=solution) + extra)
    return cfg


def _read(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_parse_config_grammar():
    raw = parse_config("problem.alpha = 0.2  # note\n\n# c\ngrid.ns=8\n")
    assert raw == {"problem.alpha": "0.2", "grid.ns": "8"}
    with pytest.raises(ConfigError):
        parse_config("problem.colour = red\n")
    with pytest.raises(ConfigError):
        parse_config("just words\n")


def test_builtins():
    e = 0.5
    b = builtin_solution("x-power", 0.25)
    assert_allclose(b.u(np.array([[0.25, 0, 0]])), 0.25**e)
    assert_allclose(b.nu1(0.1, 0.2), e)
    b = builtin_solution("q2-exterior(2.5,0.3,-0.2)", 0.25)
    assert_allclose(b.tau1(0.1, 0.2), 0.0)
    # nu1 = lim x^(2a) d/dx q2, checked against the analytic gradient at small x
    x = 1e-9
    want = x ** 0.5 * grad_q_field("Q2", np.array([x, 0.1, 0.2]), np.array(SRC), 0.25)[0]
    assert_allclose(b.nu1(0.1, 0.2), want, rtol=1e-5)
    with pytest.raises(ConfigError):
        builtin_solution("q1-exterior(1, 2)", 0.25)
    with pytest.raises(ConfigError):
        builtin_solution("sine", 0.25)


def test_lattice_points_inside():
    P = lattice_points(4, 1.0)
    assert P.shape[1] == 3 and len(P) > 0
    assert np.all(np.linalg.norm(P, axis=1) < 0.8) and np.all(P[:, 0] > 0)


def test_solve_manufactured(tmp_path, capsys):
    cfg = _write(tmp_path)
    assert main(["solve", "--config", str(cfg)]) == 0
    text = (tmp_path / "out.csv").read_text()
    assert text.splitlines()[0] == "x,y,z,u"
    data = _read(tmp_path / "out.csv")
    exact = q2(data[:, :3], np.array(SRC), 0.25)
    assert_allclose(data[:, 3], exact, atol=1e-3 * np.abs(exact).max())


def test_solve_is_bit_stable(tmp_path):
    cfg = _write(tmp_path)
    main(["solve", "--config", str(cfg)])
    first = (tmp_path / "out.csv").read_bytes()
    main(["solve", "--config", str(cfg)])
    assert (tmp_path / "out.csv").read_bytes() == first


def test_solve_zero_data(tmp_path):
    cfg = _write(tmp_path, solution="zero", extra="evaluation.lattice = 3\n")
    assert main(["solve", "--config", str(cfg)]) == 0
    assert np.abs(_read(tmp_path / "out.csv")[:, 3]).max() <= 1e-6


def test_solve_poisson_method(tmp_path):
    cfg = _write(tmp_path, kind="holmgren", solution="x-power", extra="solver.method = poisson\n")
    assert main(["solve", "--config", str(cfg)]) == 0
    data = _read(tmp_path / "out.csv")
    assert_allclose(data[:, 3], data[:, 0] ** 0.5, atol=1e-3)


def test_solve_with_tables(tmp_path):
    # hemisphere given as a table, surface data given as a table in (s, t)
    s = np.linspace(0, 2 * np.pi, 41)
    t = np.linspace(0, np.pi / 2, 21)
    S, T = np.meshgrid(s, t, indexing="ij")
    xyz = np.stack([np.cos(T), np.sin(T) * np.cos(S), np.sin(T) * np.sin(S)], -1)
    rows = np.column_stack([S.ravel(), T.ravel(), xyz.reshape(-1, 3)])
    np.savetxt(tmp_path / "surf.csv", rows, delimiter=",", header="s,t,x,y,z", comments="")
    np.savetxt(tmp_path / "phi.csv", np.column_stack([S.ravel(), T.ravel(), np.ones(S.size)]),
               delimiter=",", header="s,t,phi", comments="")
    np.savetxt(tmp_path / "pts.csv", [[0.3, 0.1, 0.1], [0.2, -0.3, 0.2]], delimiter=",", header="x,y,z", comments="")
    cfg = tmp_path / "t.cfg"
    cfg.write_text(
        "problem.alpha = 0.25\nproblem.kind = holmgren\nproblem.surface_data = phi.csv\n"
        "problem.plane_data = 0\ndomain.surface_table = surf.csv\ngrid.ns = 16\ngrid.nt = 16\n"
        "evaluation.points_file = pts.csv\noutput.path = t.csv\n"
    )
    assert main(["solve", "--config", str(cfg)]) == 0
    assert_allclose(_read(tmp_path / "t.csv")[:, 3], 1.0, atol=1e-3)


@pytest.mark.parametrize(
    "extra",
    [
        "problem.alpha = 0.6\n",
        "grid.ns = 3\n",
        "evaluation.points = 0.9 0.9 0.9\n",
        "solver.method = fem\n",
        "domain.radius = -1\n",
        "problem.colour = red\n",
    ],
)
def test_config_errors_exit_2(tmp_path, extra, capsys):
    cfg = _write(tmp_path, extra=extra)
    assert main(["solve", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "config error" in err


def test_alpha_bound_named(tmp_path, capsys):
    cfg = _write(tmp_path, extra="problem.alpha = 0.6\n")
    main(["solve", "--config", str(cfg)])
    assert "0 < 2*alpha < 1" in capsys.readouterr().err


def test_missing_config_exit_2(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_solver_error_exit_3(tmp_path, monkeypatch, capsys):
    from singular_bie import cli
    from singular_bie.exceptions import SingularSystemError

    def boom(*a, **k):
        raise SingularSystemError("density system is singular", condition=3.5e15)

    monkeypatch.setattr(cli, "solve", boom)
    assert main(["solve", "--config", str(_write(tmp_path))]) == 3
    assert "condition estimate 3.500e+15" in capsys.readouterr().err


def test_verify(capsys):
    assert main(["verify", "--suite", "plane-identity"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert sum("PASS" in ln for ln in lines) == 3
    assert all("measured=" in ln and "expected=" in ln and "tol=" in ln for ln in lines[:3])


def test_verify_failure_exit_1(monkeypatch, capsys):
    from singular_bie import cli
    from singular_bie.verification import Check

    monkeypatch.setattr(cli, "run_suite", lambda name: [Check("always off", 1.0, 0.0, 1e-3)])
    assert main(["verify", "--suite", "specfun"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "nonsense"]) == 2


def test_convergence(tmp_path):
    cfg = _write(tmp_path, extra="output.path = conv.csv\n")
    assert main(["convergence", "--config", str(cfg), "--levels", "2"]) == 0
    lines = (tmp_path / "conv.csv").read_text().splitlines()
    assert lines[0] == "level,Ns,Nt,max_rel_err,runtime_s"
    table = _read(tmp_path / "conv.csv")
    assert list(table[:, 1]) == [16, 24]
    assert table[1, 3] <= table[0, 3]


def test_convergence_levels_validated(tmp_path):
    assert main(["convergence", "--config", str(_write(tmp_path)), "--levels", "1"]) == 2


def test_convergence_needs_manufactured(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("problem.alpha = 0.25\nproblem.kind = holmgren\nproblem.surface_data = 1\nevaluation.lattice = 2\n")
    assert main(["convergence", "--config", str(cfg), "--levels", "2"]) == 2
