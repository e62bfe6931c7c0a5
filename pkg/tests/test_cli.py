from lmtool.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_parse(capsys):
    code, out = run(capsys, "parse", r"\x. x")
    assert code == 0 and out.strip() == r"\x1. x1"


def test_canon_bmc_example(capsys):
    code, out = run(capsys, "canon", "(mu 'a. ['a]x) y z")
    assert code == 0
    assert out.strip() == "mu 'a3. (['a1]x)['a3/'a1\\y . z . #]"


def test_equiv_certificate(capsys):
    code, out = run(
        capsys, "equiv", "mu 'b. (['a]x)['b/'a \\ y . #]", "mu 'b. ['b]x y"
    )
    assert code == 0
    assert "EQUIVALENT" in out and "lin" in out


def test_equiv_inconclusive(capsys):
    code, out = run(capsys, "equiv", "x", "y", "--max-states", "40", "--max-depth", "3")
    assert code == 1 and "NOT-WITHIN-BOUNDS" in out


def test_typecheck(capsys):
    code, out = run(
        capsys,
        "typecheck",
        r"\x:(iA->iB)->iA. mu 'a:iA. ['a]x (\y:iA. mu 'd:iB. ['a]y)",
    )
    assert code == 0 and "((iA->iB)->iA)->iA" in out


def test_typecheck_env_and_failure(capsys):
    code, out = run(capsys, "typecheck", "x y", "--env", "x:iA->iB,y:iA")
    assert code == 0 and "iB" in out
    code, out = run(capsys, "typecheck", "x y", "--env", "x:iA,y:iA")
    assert code == 1 and "ILL-TYPED" in out


def test_ppn_dot(capsys, tmp_path):
    out_file = tmp_path / "net.dot"
    code, out = run(capsys, "ppn", r"\x:iA. x", "--dot", str(out_file))
    assert code == 0
    assert out_file.read_text().startswith("digraph")


def test_reduce_budget(capsys):
    code, out = run(capsys, "reduce", r"(\x. x x) (\x. x x)", "--budget", "40")
    assert code == 1 and "BUDGET-EXHAUSTED" in out


def test_sigma_listing(capsys):
    code, out = run(capsys, "sigma", "(mu 'a. ['a]x) y")
    assert code == 0 and "sigma8" in out


def test_meaningful_listing(capsys):
    code, out = run(capsys, "meaningful", "(['a](x (mu 'b. ['a]y)))['g/'a\\z . #]")
    assert code == 0 and "R!=1" in out


def test_gen_deterministic(capsys):
    _, out1 = run(capsys, "gen", "--typed", "--cases", "3", "--seed", "9")
    _, out2 = run(capsys, "gen", "--typed", "--cases", "3", "--seed", "9")
    assert out1 == out2


def test_property_drivers_pass(capsys):
    code, out = run(capsys, "bisim-check", "--cases", "6", "--seed", "1")
    assert code == 0 and out.strip().endswith("PASS")
    code, out = run(capsys, "confluence-check", "--cases", "8", "--seed", "1")
    assert code == 0 and out.strip().endswith("PASS")
    code, out = run(capsys, "simcheck", "--cases", "10", "--seed", "1")
    assert code == 0 and out.strip().endswith("PASS")
