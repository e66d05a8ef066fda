import json
import math
import re

import numpy as np
import pytest

from switchthermo import acceptance, dynamics, experiments
from switchthermo.cli import ConfigError, main, parse_beta, parse_config, parse_s_grid
from switchthermo.experiments import SweepRow
from switchthermo.report import CSV_HEADER, read_csv, write_csv, write_plot
from switchthermo.states import INFINITY, C, M


@pytest.fixture(scope="module")
def fig2_rows():
    return experiments.fig2_sweep()


@pytest.fixture(scope="module")
def fig4_rows():
    return experiments.fig4_cnot_sweep()


def test_parse_config_defaults():
    cfg = parse_config(["fig2"])
    assert cfg.betas() == [0.0, INFINITY]
    assert len(cfg.s_grid) == 11 and cfg.p == 0.5 and cfg.u2 == "pswap"
    assert parse_config(["fig4"]).betas() == [INFINITY]
    cfg = parse_config(["fig3c"])
    assert cfg.betas() == [0.0] and cfg.s_grid == [1.0]


def test_parse_config_flags():
    cfg = parse_config(["fig3c", "--s", "1", "--beta", "0"])
    assert cfg.s_grid == [1.0] and cfg.betas() == [0.0]
    cfg = parse_config(["sweep", "--beta", "inf", "--s-grid", "0,0.5,0.25", "--lambda", "0.3", "--u2", "pcnot"])
    assert cfg.betas() == [INFINITY] and cfg.s_grid == [0.0, 0.25, 0.5]
    assert cfg.lam == 0.3 and cfg.u2 == "pcnot"


def test_parse_beta():
    assert parse_beta("inf") == INFINITY and parse_beta("0.5") == 0.5
    for bad in ("-1", "nan", "hot"):
        with pytest.raises(ConfigError):
            parse_beta(bad)


def test_parse_s_grid():
    assert parse_s_grid("0,1,0.1") == [round(0.1 * k, 12) for k in range(11)]
    for bad in ("0,1", "0,1,0", "1,0,0.1", "a,b,c"):
        with pytest.raises(ConfigError):
            parse_s_grid(bad)


@pytest.mark.parametrize(
    "argv,field",
    [
        (["fig2", "--p", "1.5"], "p"),
        (["fig2", "--s", "1.2"], "s"),
        (["fig2", "--lambda", "-0.1"], "lambda"),
        (["fig2", "--beta", "-2"], "beta"),
        (["fig2", "--workers", "0"], "workers"),
    ],
)
def test_parse_config_range_errors_name_the_field(argv, field):
    with pytest.raises(ConfigError, match=rf"^{field}:"):
        parse_config(argv)


def test_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "sweep", "s_grid": [0.2, 0.4], "lambda": 0.5, "beta": "inf"}))
    cfg = parse_config(["sweep", "--config", str(path)])
    assert cfg.s_grid == [0.2, 0.4] and cfg.lam == 0.5 and cfg.betas() == [INFINITY]
    # explicit flags win over the file
    cfg = parse_config(["sweep", "--config", str(path), "--lambda", "0.9"])
    assert cfg.lam == 0.9


@pytest.mark.parametrize(
    "payload,match",
    [
        ({"colour": "red"}, "unknown keys"),
        ({"command": "fig2"}, "command"),
        ({"p": 2}, "p:"),
        ([1, 2], "JSON object"),
    ],
)
def test_config_file_errors(tmp_path, payload, match):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(ConfigError, match=match):
        parse_config(["sweep", "--config", str(path)])


def test_write_csv_header_only(tmp_path):
    path = write_csv([], tmp_path / "empty.csv")
    assert path.read_text(encoding="utf-8") == ",".join(CSV_HEADER) + "\n"


def test_write_csv_fig2(tmp_path, fig2_rows):
    a = write_csv(fig2_rows, tmp_path / "a.csv").read_bytes()
    b = write_csv(list(reversed(fig2_rows)), tmp_path / "b.csv").read_bytes()
    assert a == b
    lines = a.decode().splitlines()
    assert len(lines) == 45
    assert lines[1].startswith("0,0,0,0.5,pswap,1,")


def test_csv_round_trip(tmp_path, fig2_rows):
    path = write_csv(fig2_rows + [experiments.fig3c_row()], tmp_path / "rt.csv")
    back = read_csv(path)
    rows = sorted(fig2_rows + [experiments.fig3c_row()], key=SweepRow.sort_key)
    assert len(back) == len(rows)
    for x, y in zip(rows, back):
        for name in ("beta", "s", "lam", "p", "i_bits", "i_bits_maxp", "coherence_cost_bits"):
            a, b = getattr(x, name), getattr(y, name)
            assert a == b or math.isclose(a, b, rel_tol=1e-11, abs_tol=1e-300)
        assert x.u2 == y.u2 and x.extras.keys() == y.extras.keys()
        assert (x.witness_distance is None) == (y.witness_distance is None)


def count(svg: str, cls: str) -> int:
    return len(re.findall(rf'<polyline class="{cls}"', svg))


def test_write_plot_single_row(tmp_path, fig2_rows):
    svg = write_plot(fig2_rows[:1], tmp_path / "one.svg").read_text()
    assert count(svg, "series") == 1 and svg.count("<circle") == 1
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")


def test_write_plot_series_counts(tmp_path, fig2_rows, fig4_rows):
    svg2 = write_plot(fig2_rows, tmp_path / "fig2.svg").read_text()
    assert count(svg2, "series") == 4 and count(svg2, "reference") == 0
    svg4 = write_plot(fig4_rows, tmp_path / "fig4.svg", reference="bound_off").read_text()
    assert count(svg4, "series") == 2 and count(svg4, "reference") == 1
    assert "thermalization strength s" in svg4
    again = write_plot(fig4_rows, tmp_path / "fig4b.svg", reference="bound_off").read_text()
    assert again == svg4


def test_main_fig4_writes_files(tmp_path, capsys):
    assert main(["fig4", "--s-grid", "0,1,0.5", "--out", str(tmp_path), "--plot"]) == 0
    rows = read_csv(tmp_path / "fig4.csv")
    assert len(rows) == 6 and {r.beta for r in rows} == {INFINITY}
    assert (tmp_path / "fig4.svg").exists()
    assert "wrote" in capsys.readouterr().out


def test_main_fig3c_prints_state(tmp_path, capsys):
    assert main(["fig3c", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "trace distance to tau_M=0.125" in out
    (row,) = read_csv(tmp_path / "fig3c.csv")
    assert row.witness_distance == pytest.approx(0.125, abs=1e-10)


def test_main_fig3a_fig3b_tables(tmp_path):
    assert main(["fig3a", "--s", "1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig3a.csv").read_text().splitlines()
    assert lines[0] == "s,n,fidelity,leakage,commutator_norm" and len(lines) == 17
    assert main(["fig3b", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig3b.csv").read_text().splitlines()
    assert lines[0] == "beta,s,u2,trace_distance" and len(lines) == 3


def test_main_reruns_are_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["fig3d", "--s-grid", "0,1,0.5", "--out", str(tmp_path / d), "--plot"]) == 0
    for name in ("fig3d.csv", "fig3d.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_main_usage_errors(capsys):
    assert main(["fig2", "--p", "1.5"]) == 2
    assert "p:" in capsys.readouterr().err
    assert main(["fig2", "--bogus"]) == 2
    assert main(["nope"]) == 2


def test_main_io_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["sweep", "--s", "0.5", "--beta", "0", "--out", str(blocker)]) == 3
    assert str(blocker) in capsys.readouterr().err


def test_verify_detects_dropped_branch(monkeypatch):
    def one_branch(u1, u2):
        a = dynamics.embed(u1).matrix
        b = dynamics.embed(u2).matrix
        keep = np.zeros(16)
        keep[:8] = 1.0
        return dynamics.Unitary(keep[:, None] * (b @ a), (C, M, 2, 3))

    monkeypatch.setattr(dynamics, "switch_unitary", one_branch)
    outcome = acceptance.evaluate(acceptance.CRITERIA[2])
    assert outcome.criterion.number == 3 and not outcome.passed
    lines = []
    assert acceptance.verify(emit=lines.append) == 1
    assert any(line.startswith("[FAIL]  3.") for line in lines)


def test_verify_with_zero_tolerance_fails():
    lines = []
    assert acceptance.verify(tol=0.0, emit=lines.append) == 1
    failed = {int(line.split(".")[0].split()[-1]) for line in lines if line.startswith("[FAIL]")}
    assert {3, 6} <= failed
