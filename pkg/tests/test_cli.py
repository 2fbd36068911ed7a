from eicomb.channel import bec, parse_channel
from eicomb.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_inline_erasure(capsys):
    code, out, _ = run(capsys, "eval", "bec:0.3", "--all")
    assert code == 0
    assert "E(a) = 0.15" in out
    assert "H(a) = 0.3" in out
    assert "B(a) = 0.3" in out


def test_eval_perfect_channel(capsys):
    code, out, _ = run(capsys, "eval", "bsc:0", "--all")
    assert code == 0
    assert out.count("= 0\n") == 3


def test_eval_single_functional_from_file(tmp_path, capsys):
    path = tmp_path / "chan.ch"
    path.write_text("0.0 0.7\n0.5 0.3\n")
    code, out, _ = run(capsys, "eval", str(path), "--functional", "H")
    assert code == 0
    assert out.strip() == "H(a) = 0.3"


def test_eval_series_power(capsys):
    code, out, _ = run(capsys, "eval", "bec:0.3", "--functional", "H", "--power", "4")
    assert code == 0
    assert "0.7599" in out


def test_eval_bad_channel_is_usage_error(capsys):
    code, _, err = run(capsys, "eval", "bsc:0.7")
    assert code == 2
    assert "error:" in err


def test_convolve_two_bscs(capsys):
    code, out, _ = run(capsys, "convolve", "bsc:0.1", "bsc:0.2")
    assert code == 0
    assert parse_channel(out).approx_eq(parse_channel("0.26 1\n"), tol=1e-15)


def test_convolve_power(capsys):
    code, out, _ = run(capsys, "convolve", "bec:0.3", "--power", "4")
    assert code == 0
    assert parse_channel(out).approx_eq(bec(1 - 0.7**4), tol=1e-12)


def test_convolve_identity_file(tmp_path, capsys):
    path = tmp_path / "chan.ch"
    path.write_text("0.1 0.25\n0.3 0.75\n")
    code, out, _ = run(capsys, "convolve", "bsc:0", str(path))
    assert code == 0
    assert parse_channel(out).approx_eq(parse_channel(path.read_text()), tol=1e-15)


def test_convolve_cap_exceeded_hints_series(tmp_path, capsys):
    path = tmp_path / "chan.ch"
    path.write_text("0.05 0.2\n0.1 0.2\n0.2 0.2\n0.3 0.2\n0.4 0.2\n")
    code, _, err = run(capsys, "convolve", str(path), "--power", "200")
    assert code == 2
    assert "series" in err


def test_parse_error_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.ch"
    path.write_text("0.1 0.4\noops\n")
    code, _, err = run(capsys, "eval", str(path))
    assert code == 2
    assert "line 2" in err


def test_coeffs_bracket(tmp_path, capsys):
    out_path = tmp_path / "coeffs.csv"
    code, out, _ = run(capsys, "coeffs", "--functional", "B", "--count", "50",
                       "--out", str(out_path))
    assert code == 0
    assert "brackets_one=True" in out
    lines = out_path.read_text().splitlines()
    assert lines[0] == "n,coefficient,partial_sum,tail_bound"
    assert len(lines) == 51
    assert lines[1].startswith("1,0.5,")


def test_suite_ineq_passes_and_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code1, out1, _ = run(capsys, "suite", "ineq", "--seed", "42", "--trials", "40",
                         "--out", str(a))
    code2, out2, _ = run(capsys, "suite", "ineq", "--seed", "42", "--trials", "40",
                         "--out", str(b))
    assert code1 == code2 == 0
    assert "violations=0" in out1
    assert a.read_bytes() == b.read_bytes()
    other = main(["suite", "ineq", "--seed", "43", "--trials", "40", "--out", str(b)])
    capsys.readouterr()
    assert other == 0
    assert a.read_bytes() != b.read_bytes()


def test_suite_upper_small(tmp_path, capsys):
    code, out, _ = run(capsys, "suite", "upper", "--seed", "1", "--trials", "20",
                       "--rho", "x^3", "--functional", "H",
                       "--out", str(tmp_path / "u.csv"))
    assert code == 0
    assert "violations=0" in out


def test_suite_area_small(tmp_path, capsys):
    code, out, _ = run(capsys, "suite", "area", "--ensemble", "50,100", "--seed", "2",
                       "--trials", "20", "--grid-points", "12",
                       "--out", str(tmp_path / "area.csv"))
    assert code == 0
    assert "violations=0" in out
    assert "interval" in out


def test_suite_claim_tiny(tmp_path, capsys):
    code, out, _ = run(capsys, "suite", "claim", "--ensemble", "3,6", "--seed", "0",
                       "--restarts", "2", "--out", str(tmp_path / "claim.csv"))
    # the h=0.1 maximization cell is a genuine miss (see the area notes in
    # the README); every other cell must hit
    lines = [l for l in out.splitlines() if l.startswith("claim")]
    assert len(lines) == 18
    misses = [l for l in lines if "MISS" in l]
    assert misses == ["claim max h=0.1: 0/2 BEC verdicts  [MISS]"]
    assert code == 1


def test_unknown_functional_is_usage_error(capsys):
    code, _, err = run(capsys, "eval", "bec:0.3", "--functional", "Q")
    assert code == 2
    assert "unknown functional" in err
