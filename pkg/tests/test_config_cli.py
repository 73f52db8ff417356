import json
import math

import numpy as np
import pytest

from qednonlin import cli
from qednonlin.config import parse_config
from qednonlin.errors import ConfigError
from qednonlin.io import fmt, read_csv, sha256, write_csv, write_json
from qednonlin.operators import JOSEPHSON_UNIT
from qednonlin.params import TWO_PI, Truncation


def test_minimal_config_defaults():
    cfg = parse_config('[experiment]\ntype = "spectrum"\n')
    assert cfg.kind == "spectrum"
    assert cfg.trunc == Truncation(4, 12)
    assert cfg.physical.E_J_over_hbar == pytest.approx(TWO_PI * 10)
    assert len(cfg.experiment.Ng) == 101


def test_physical_units_and_grids():
    cfg = parse_config(
        """
[physical]
E_J_GHz = 5
gamma_minus_GHz = 0.1
josephson = "unit"
[truncation]
n_p_max = 7
[experiment]
type = "steady"
Ng = {start = 0.0, stop = 0.5, num = 6}
theta_ex = [0.0, 1.0]
"""
    )
    assert cfg.physical.E_J_over_hbar == pytest.approx(TWO_PI * 5)
    assert cfg.physical.gamma_minus == pytest.approx(TWO_PI * 0.1)
    assert cfg.josephson == JOSEPHSON_UNIT
    assert cfg.trunc == Truncation(1, 7)
    assert cfg.experiment.Ng == pytest.approx(tuple(np.linspace(0, 0.5, 6)))


@pytest.mark.parametrize(
    "text, message",
    [
        ("[experiment]\n", "missing experiment"),
        ('[experiment]\ntype = "spectrum"\nfoo = 1\n', "unknown key 'foo' in [experiment]"),
        ('[physical]\nL_nH = -1\n[experiment]\ntype = "spectrum"\n', "invariant violated"),
        ('[experiment]\ntype = "maser"\ntarget = "A9"\n', "maser target"),
        ('[experiment]\ntype = "squeeze"\nmu = [0.5, 1.0]\n', "squeeze mu grid"),
        ('[experiment]\ntype = "spectrum"\nNg = []\n', "is empty"),
        ("not toml = = 1", "malformed"),
        ('[physical]\nxi = 1.5\n[experiment]\ntype = "spectrum"\n', "invariant violated"),
    ],
)
def test_config_errors(text, message):
    with pytest.raises(ConfigError, match=None) as exc:
        parse_config(text)
    assert message in str(exc.value)


def test_subcommand_must_match_type():
    with pytest.raises(ConfigError):
        parse_config('[experiment]\ntype = "spectrum"\n', "maser")
    assert parse_config("", "mcwf").kind == "mcwf"


def test_fmt_and_csv_roundtrip(tmp_path):
    assert fmt(3) == "3"
    assert fmt(math.nan) == "nan"
    assert fmt(1 / 3) == "3.33333333333e-01"
    path = write_csv(tmp_path / "x.csv", ["a[ns]", "b[1]"], [(0.5, 2), (1.5, math.nan)])
    header, data = read_csv(path)
    assert header == ["a[ns]", "b[1]"]
    assert data[0, 0] == 0.5 and math.isnan(data[1, 1])
    with pytest.raises(ValueError):
        write_csv(tmp_path / "y.csv", ["a"], [(1, 2)])


def test_json_nan_becomes_null(tmp_path):
    path = write_json(tmp_path / "x.json", {"v": math.nan, "arr": np.arange(2)})
    assert json.loads(path.read_text()) == {"arr": [0, 1], "v": None}


SMALL = {
    "spectrum": '[experiment]\ntype="spectrum"\nNg={start=0.0,stop=1.0,num=5}\nanticrossings=["A2"]\n',
    "maser": '[truncation]\nn_p_max=8\n[experiment]\ntype="maser"\ntau=[0.0,1.0]\n',
    "steady": '[truncation]\nn_p_max=5\n[experiment]\ntype="steady"\nNg=[0.5]\ntheta_ex=[0.0]\n',
    "mcwf": '[truncation]\nn_p_max=4\n[experiment]\ntype="mcwf"\nn_traj=2\nt_end_ns=0.5\nwrite_trajectories=1\n',
    "squeeze": '[experiment]\ntype="squeeze"\nmu=[0.0,0.5]\nn_out=11\n',
}


@pytest.mark.parametrize("kind", sorted(SMALL))
def test_cli_runs_and_writes_manifest(tmp_path, kind):
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL[kind] + "[output]\nemit_plots = true\n")
    out = tmp_path / "out"
    assert cli.main([kind, "--config", str(cfg), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["version"] == "0.1.0"
    assert manifest["outputs"]
    for name, digest in manifest["outputs"].items():
        assert sha256(out / name) == digest
    assert any(name.endswith(".gp") for name in manifest["outputs"])


def test_cli_seed_reproducible(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL["mcwf"])
    for tag in ("a", "b"):
        assert cli.main(["mcwf", "--config", str(cfg), "--out", str(tmp_path / tag), "--seed", "11"]) == 0
    assert (tmp_path / "a/ensemble.csv").read_bytes() == (tmp_path / "b/ensemble.csv").read_bytes()
    assert (tmp_path / "a/trajectory_11.csv").exists()


def test_cli_env_overrides_config_dir(tmp_path, monkeypatch):
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL["squeeze"] + f'[output]\ndir = "{tmp_path / "from_config"}"\n')
    monkeypatch.setenv(cli.ENV_OUT, str(tmp_path / "from_env"))
    assert cli.main(["squeeze", "--config", str(cfg)]) == 0
    assert (tmp_path / "from_env/manifest.json").exists()
    assert not (tmp_path / "from_config").exists()
    # --out wins over the environment
    assert cli.main(["squeeze", "--config", str(cfg), "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag/manifest.json").exists()


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[experiment]\ntype = 'spectrum'\nNg = 'x'\n")
    assert cli.main(["spectrum", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["spectrum", "--config", str(tmp_path / "missing.toml")]) == cli.EXIT_IO
    # without a junction the levels cross and no pi pulse exists
    odd = tmp_path / "odd.toml"
    odd.write_text("[physical]\nE_J_GHz = 0\n[truncation]\nn_p_max=4\n[experiment]\ntype='maser'\n")
    code = cli.main(["maser", "--config", str(odd), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_NUMERIC
    blocker = tmp_path / "file"
    blocker.write_text("")
    good = tmp_path / "c2.toml"
    good.write_text(SMALL["squeeze"])
    assert cli.main(["squeeze", "--config", str(good), "--out", str(blocker / "sub")]) == cli.EXIT_IO


def test_cli_spectrum_rows_and_echo(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[experiment]\ntype="spectrum"\nanticrossings=[]\n')
    out = tmp_path / "o"
    assert cli.main(["spectrum", "--config", str(cfg), "--out", str(out)]) == 0
    header, data = read_csv(out / "spectrum.csv")
    assert data.shape[0] == 101
    assert header[0] == "N_g[1]" and header[1] == "E_0[GHz]"
    derived = json.loads((out / "manifest.json").read_text())["derived"]
    assert derived["omega0_GHz"] == pytest.approx(22.5, rel=0.01)


def test_cli_maser_pi_pulse_row(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[experiment]\ntype="maser"\ntarget="A2"\ntau=[0.0, 0.5, 1.0]\n')
    out = tmp_path / "o"
    assert cli.main(["maser", "--config", str(cfg), "--out", str(out)]) == 0
    header, data = read_csv(out / "maser_A2.csv")
    assert header[4] == "P_2[1]"
    assert data[2, 4] > 0.9
