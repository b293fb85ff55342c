"""End-to-end checks of the command-line front end.

Everything runs in-process through `run` (argparse included), so these
are cheap; one test goes through the installed console script to make
sure the packaging entry point resolves.
"""

import json
import shutil
import subprocess
import sys
from fractions import Fraction as F

import pytest

from nscoding.capacity import capacity_table
from nscoding.channels import builtin_z0z1
from nscoding.cli import channel_digest, run
from nscoding.type_mapping import map_sequence


def write_identity_channel(tmp_path):
    path = tmp_path / "ident.json"
    path.write_text(
        json.dumps(
            {
                "x_size": 2,
                "y_size": 2,
                "s_size": 1,
                "kernel": [[["1", "0"], ["0", "1"]]],
                "state_dist": ["1"],
            }
        )
    )
    return str(path)


def test_toy_pipeline_passes():
    code, text = run(["toy"])
    assert code == 0
    assert "success = 1" in text
    assert "C1/C2/C3: pass" in text
    assert "marginal = 1/4" in text


def test_theorem2_pipeline_exhibits_the_gap():
    code, text = run(["theorem2"])
    assert code == 0
    assert "certificate objective = 13/16" in text
    assert "classical CSIR ≥ 7/8: pass" in text
    assert "assisted causal optimum (LP2) = 13/16" in text
    assert "explicit strategy success = 7/8" in text
    assert "strict separation: pass" in text


def test_certificate_subcommand():
    code, text = run(["lp", "certificate", "--builtin", "z0z1"])
    assert code == 0
    assert "certificate objective = 13/16" in text
    assert "FAIL" not in text


def test_lp_solve_reports_exact_optimum():
    code, text = run(["lp", "solve", "--channel", "z0z1", "--M", "2", "--n", "2"])
    assert code == 0
    assert "optimum = 13/16" in text
    assert "status = optimal" in text


def test_lp_solution_export_is_rational_and_reproducible():
    argv = [
        "lp", "solve", "--channel", "z0z1", "--M", "2", "--n", "2", "--solution",
    ]
    code, text = run(argv)
    assert code == 0
    entries = [line for line in text.splitlines() if line.startswith("solution[")]
    assert entries
    for line in entries:
        F(line.split(" = ")[1])  # parses as an exact rational
    assert run(argv) == (code, text)


def test_classical_subcommand_prints_witness_table():
    code, text = run(
        ["classical", "--channel", "z0z1", "--M", "2", "--n", "2", "--csir"]
    )
    assert code == 0
    assert "optimum = 7/8" in text
    witness = [line for line in text.splitlines() if line.startswith("witness = ")]
    assert len(witness) == 2 * 2 + 2 * 4


def test_capacity_subcommand_matches_library_values():
    code, text = run(["capacity", "z0z1", "--gp-restarts", "2", "--seed", "0"])
    assert code == 0
    table = capacity_table(builtin_z0z1(), gp_restarts=2, seed=0)
    for cell, value in table.cells().items():
        assert f"{cell} = {value:.12g}" in text
    assert "seed = 0" in text


def test_scheme_build_and_verify(tmp_path):
    channel = write_identity_channel(tmp_path)
    code, text = run(["scheme", "build", "--channel", channel, "--n", "8", "--eps", "1/2"])
    assert code == 0
    assert "mu = 4" in text
    assert "message_count = 4" in text
    assert "lambda = 1" in text

    code, text = run(["scheme", "verify", "--channel", channel, "--n", "8", "--eps", "1/2"])
    assert code == 0
    assert "C1/C2/C3: pass" in text
    assert "marginal uniform: pass" in text


def test_scheme_simulate_exact(tmp_path):
    channel = write_identity_channel(tmp_path)
    code, text = run(
        ["scheme", "simulate", "--channel", channel, "--n", "8", "--eps", "1/2"]
    )
    assert code == 0
    assert "success = 7/8" in text


def test_scheme_simulate_mc_is_seeded(tmp_path):
    channel = write_identity_channel(tmp_path)
    argv = [
        "scheme", "simulate", "--channel", channel, "--n", "8", "--eps", "1/2",
        "--mode", "mc", "--samples", "20000", "--seed", "3",
    ]
    code, text = run(argv)
    assert code == 0
    estimate = float(
        next(l for l in text.splitlines() if l.startswith("success_estimate")).split(" = ")[1]
    )
    assert 0.85 <= estimate <= 0.9  # exact value is 7/8
    assert run(argv) == (code, text)


def test_typemap_subcommand_mirrors_the_library():
    code, text = run(
        ["typemap", "--n", "6", "--dist", "1/2,1/2", "--eps", "1/3", "--seq", "0,1,1,1,0,1"]
    )
    assert code == 0
    mapped = map_sequence(6, 2, [F(1, 2), F(1, 2)], (0, 1, 1, 1, 0, 1), F(1, 3))
    assert f"output = {','.join(str(v) for v in mapped.output)}" in text
    assert f"flag = {mapped.flag}" in text


def test_json_report_mirrors_text(tmp_path):
    code, text = run(["toy"])
    json_code, blob = run(["toy", "--json"])
    assert (code, json_code) == (0, 0)
    doc = json.loads(blob)
    assert doc["command"] == "toy"
    for key, value in doc["results"].items():
        assert f"{key} = {value}" in text
    for key, verdict in doc["checks"].items():
        assert f"{key}: {'pass' if verdict == 'pass' else 'FAIL'}" in text


def test_channel_digest_is_stable_and_content_sensitive():
    a = channel_digest(builtin_z0z1())
    assert a == channel_digest(builtin_z0z1())
    assert len(a) == 12
    from nscoding.channels import builtin_product_xs

    assert a != channel_digest(builtin_product_xs())


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as err:
        run(["bogus"])
    assert err.value.code == 2


def test_module_error_exits_1():
    code, text = run(["lp", "solve", "--channel", "missing.json", "--M", "2", "--n", "2"])
    assert code == 1
    assert text.startswith("error:")


def test_console_script_entry_point():
    exe = shutil.which("nscoding")
    if exe is None:
        pytest.skip("package not installed with scripts")
    proc = subprocess.run(
        [exe, "lp", "certificate", "--builtin", "z0z1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "certificate objective = 13/16" in proc.stdout
    assert sys.version_info >= (3, 9)
