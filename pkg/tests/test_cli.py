"""Command line surface: exit codes, stream discipline, payload shapes,
and byte-for-byte determinism of reruns."""

import json
import subprocess
import sys

import pytest

from adekit.cli import main
from adekit.expr import eval_numeric, parse

PAIR_DEFS = ["--def", "f=z+exp(z)", "--def", "g=z+2*pi*i+exp(z)"]


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_series_golden(capsys):
    rc, out, err = run(capsys, "series", "--subject", "exp(z)", "--order", "4")
    assert rc == 0
    assert out == "order 4\ncenter 0\n0: 1\n1: 1\n2: 1/2\n3: 1/6\n4: 1/24\n"
    assert err == ""


def test_series_with_definitions(capsys):
    rc, out, _ = run(
        capsys, "series", "--subject", "f(z)", "--def", "f=z^2+1", "--order", "2"
    )
    assert rc == 0
    assert out.splitlines()[2:] == ["0: 1", "1: 0", "2: 1"]


def test_series_numeric_mode(capsys):
    rc, out, _ = run(
        capsys,
        "series", "--subject", "exp(z)", "--order", "2",
        "--mode", "numeric", "--center", "1",
    )
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "order 2"
    assert lines[1] == "center (1+0j)"
    assert all(":" in line for line in lines[2:])


def test_diff(capsys):
    rc, out, _ = run(capsys, "diff", "--subject", "z^3", "--count", "2")
    assert rc == 0
    # syntactic derivative, so no constant folding; check the value instead
    assert eval_numeric(parse(out.strip()), 2.0) == pytest.approx(12.0)


def test_find_ade_text(capsys):
    rc, out, err = run(capsys, "find-ade", "--subject", "exp(z)")
    assert rc == 0
    assert out == "y1 - y0\n"
    assert "found at weight=1 degree=1 coeff_degree=0" in err


def test_find_ade_json(capsys):
    rc, out, _ = run(capsys, "find-ade", "--subject", "exp(z)", "--format", "json")
    assert rc == 0
    payload = json.loads(out)
    assert payload["ade"] == "y1 - y0"
    assert payload["found_at"] == [1, 1, 0]
    assert payload["kernel_dimension"] == 1
    assert isinstance(payload["escalations"], list)


def test_find_ade_exhaustion_exits_1(capsys):
    rc, out, err = run(
        capsys,
        "find-ade", "--subject", "exp(exp(z))",
        "--max-weight", "1", "--max-degree", "1", "--max-coeff-degree", "0",
    )
    assert rc == 1
    assert out == ""
    assert err.startswith("not found:")


def test_rewrite_chain_table(capsys):
    rc, out, _ = run(capsys, "rewrite-chain", "--order", "2")
    assert rc == 0
    assert out.startswith("T2 = ")
    assert "G2" in out and "G1" in out


def test_rewrite_chain_equation_support(capsys):
    rc, out, _ = run(capsys, "rewrite-chain", "--ade", "y2 - y1 + 1", "--format", "json")
    assert rc == 0
    payload = json.loads(out)
    assert payload["support_J"] == ["1", "y1", "y2"]
    assert set(payload["coefficients"]) == {"1", "y1", "y2"}


def test_check_permutable_accepts_the_translate_pair(capsys):
    rc, out, _ = run(
        capsys, "check-permutable", "--subject", "f(z),g(z)", *PAIR_DEFS,
        "--order", "12",
    )
    assert rc == 0
    assert out == "permutable through order 12\n"


def test_check_permutable_rejects_and_exits_1(capsys):
    rc, out, _ = run(capsys, "check-permutable", "--subject", "exp(z),sin(z)")
    assert rc == 1
    assert out.startswith("not permutable: series differ at index")


def test_transfer_json_reruns_are_byte_identical(capsys):
    argv = (
        "transfer-ade", "--subject", "f(z),g(z)", *PAIR_DEFS,
        "--ade", "y2 - y1 + 1", "--verified-order", "16", "--format", "json",
    )
    rc1, out1, _ = run(capsys, *argv)
    rc2, out2, _ = run(capsys, *argv)
    assert rc1 == rc2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert list(payload) == [
        "status", "q", "intermediate_ade", "support_J", "output_ade",
        "verified_order", "escalations", "wall_time_ms",
    ]
    assert payload["status"] == "ok"
    assert payload["q"] == 1
    assert payload["support_J"] == ["1", "y1", "y2"]
    assert payload["output_ade"] == "y2 - y1 + 1"
    assert payload["wall_time_ms"] == 0


def test_compose_ade_tower(capsys):
    rc, out, _ = run(
        capsys,
        "compose-ade", "--subject", "exp(z),exp(z)",
        "--ade", "y1 - y0", "--ade", "y1 - y0",
    )
    assert rc == 0
    assert out.splitlines()[0] == "y0*y2 - y1^2 - y0*y1"


def test_iterate_ade_square(capsys):
    rc, out, _ = run(
        capsys,
        "iterate-ade", "--subject", "z^2", "--ade", "z*y1 - 2*y0", "--count", "2",
        "--center", "1",
    )
    assert rc == 0
    assert out.splitlines()[0] == "z*y1 - 4*y0"


def test_growth_max_modulus_golden(capsys):
    rc, out, _ = run(
        capsys, "growth", "max-modulus", "--subject", "z^3", "--radius", "2"
    )
    assert rc == 0
    assert out == "max_modulus,2.0,7.999999999999998,1024\n"


def test_growth_characteristic_golden_rerun(capsys):
    argv = (
        "growth", "characteristic", "--subject", "exp(z)",
        "--radii", "1,5", "--samples", "512",
    )
    rc1, out1, _ = run(capsys, *argv)
    rc2, out2, _ = run(capsys, *argv)
    assert rc1 == rc2 == 0
    assert out1 == out2
    assert out1 == (
        "characteristic,1.0,0.31830589143212884,512\n"
        "characteristic,5.0,1.591529457160644,512\n"
    )


def test_growth_baker_scan_found(capsys):
    rc, out, _ = run(
        capsys,
        "growth", "baker-scan", "--subject", "exp(z),exp(exp(z))",
        "--max-p", "5", "--radii", "2,3,4",
    )
    assert rc == 0
    lines = out.splitlines()
    assert lines[-1] == "baker_result,3"
    assert len(lines) == 10
    assert all(line.startswith("baker,") for line in lines[:-1])


def test_growth_baker_scan_not_found_exits_1(capsys):
    rc, out, _ = run(
        capsys,
        "growth", "baker-scan", "--subject", "exp(z),exp(exp(z))",
        "--max-p", "1", "--radii", "2",
    )
    assert rc == 1
    assert out.splitlines()[-1] == "baker_result,none"


def test_growth_inequalities_reports_all_rows(capsys):
    rc, out, _ = run(
        capsys,
        "growth", "inequalities", "--subject", "exp(z),exp(exp(z))",
        "--radius", "4", "--samples", "256",
    )
    assert rc == 0
    lines = out.splitlines()
    assert all(line.startswith("inequality,") for line in lines)
    named = {line.split(",")[1] for line in lines}
    assert "composition_lower_bound" in named
    assert "shrunk_modulus_dominates_power" in named
    # the honest negative stays a row, not an exit code
    assert any(
        line.split(",")[1] == "shrunk_modulus_dominates_power" and line.endswith(",false")
        for line in lines
    )


def test_usage_errors_exit_2(capsys):
    cases = [
        ("series", "--subject", "z + * 2"),
        ("series", "--subject", "f(z)"),
        ("series", "--subject", "z", "--def", "nonsense"),
        ("series", "--subject", "1/z"),
        ("compose-ade", "--subject", "exp(z),exp(z)", "--ade", "y1 - y0"),
        ("growth", "characteristic", "--subject", "exp(z)", "--samples", "100"),
    ]
    for argv in cases:
        rc = main(list(argv))
        captured = capsys.readouterr()
        assert rc == 2, argv
        assert captured.out == ""
        assert captured.err.startswith("error:"), argv


def test_argparse_rejects_unknown_command():
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


def test_timing_goes_to_stderr_only(capsys):
    rc, plain_out, _ = run(capsys, "series", "--subject", "exp(z)", "--order", "3")
    rc2, timed_out, timed_err = run(
        capsys, "series", "--subject", "exp(z)", "--order", "3", "--timing"
    )
    assert rc == rc2 == 0
    assert timed_out == plain_out
    assert "wall_time_ms=" in timed_err


def test_installed_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "adekit.cli", "--help"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert "series" in proc.stdout and "transfer-ade" in proc.stdout
