import io

import pytest

from transfinite import cli, corpus, iam
from transfinite.lc_logic import PHI_LIM_TEXT

from test_otm import ZIGZAG


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_corpus_list():
    code, out, _ = run("corpus", "list")
    assert code == 0 and len(out.splitlines()) == len(corpus.ENTRIES)


def test_corpus_show_unknown():
    assert run("corpus", "show", "nope")[0] == cli.EXIT_USAGE


def test_otm_run_halts(files):
    path = files("succ.otm", corpus.SUCCESSOR)
    code, out, _ = run("otm", "run", path, "--input", "3")
    assert code == 0 and out.splitlines()[-1] == "end=halt clock=4"


def test_otm_run_bound_reached(files):
    path = files("b.otm", corpus.get("blinker").text)
    code, out, _ = run("--bound", "w", "otm", "run", path)
    assert code == cli.EXIT_BOUND and out.splitlines()[-1] == "end=bound clock=w"


def test_otm_run_checkpoints(files):
    path = files("b.otm", corpus.get("blinker").text)
    code, out, _ = run("otm", "run", path, "--bound", "w+3", "--checkpoints", "w,w+1")
    cps = [line for line in out.splitlines() if line.startswith("checkpoint")]
    assert len(cps) == 2 and cps[0].startswith("checkpoint clock=w ")


def test_otm_run_acceleration_failure(files):
    code, _, err = run("otm", "run", files("z.otm", ZIGZAG), "--bound", "w")
    assert code == cli.EXIT_ACCEL and "AccelerationFailure" in err


def test_otm_parse_error_has_line(files):
    code, _, err = run("otm", "run", files("bad.otm", "states: 2\nhalt: 1\n0 0 -> 1 X 0\n"))
    assert code == cli.EXIT_SYNTAX and "line 3" in err


def test_missing_file():
    assert run("otm", "run", "/nonexistent/p.otm")[0] == cli.EXIT_IO


def test_usage_errors():
    assert run("frobnicate")[0] == cli.EXIT_USAGE
    assert run("otm", "run")[0] == cli.EXIT_USAGE
    assert run("--bound", "w^1", "corpus", "list")[0] == cli.EXIT_USAGE


def test_compile_then_iam_run(files, tmp_path):
    src = files("succ.otm", corpus.SUCCESSOR)
    target = str(tmp_path / "succ.iam")
    assert run("compile", src, "-o", target)[0] == 0
    assert (tmp_path / "succ.iam.enc").read_text().startswith("source=succ")
    code, out, _ = run("iam", "run", target, "--input", "3")
    assert code == 0 and "function-answer=4" in out.splitlines()
    code, out, _ = run("iam", "run", target, "--input", "w+3", "--bound", "w*2")
    assert code == 0 and "function-answer=w+4" in out.splitlines()


def test_compile_is_byte_stable(files):
    src = files("s.otm", corpus.get("four_cycle").text)
    a, b = run("compile", src)[1], run("compile", src)[1]
    assert a == b
    iam.parse_program(a)  # sidecar lines are comments


def test_compile_multi_tape(files):
    text = "states: 2\ntapes: 2\nhalt: 1\n" + "\n".join(
        f"0 {a}{b} -> {a}{b} RR 1" for a in "01" for b in "01") + "\n"
    assert run("compile", files("two.otm", text))[0] == cli.EXIT_UNSUPPORTED


def test_iam_run_trace_and_halt(files):
    path = files("h.iam", "alphabet: #0 #1 #H\n((y = o{0} & z = #H) | (!(y = o{0}) & z = #0))\n")
    code, out, _ = run("iam", "run", path, "--trace")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "clock=0 domain=0 changed=" and "halt=1" in lines


def test_iam_run_not_functional(files):
    code, _, err = run("iam", "run", files("n.iam", "alphabet: #0 #H\nz = z\n"))
    assert code == cli.EXIT_NOT_FUNCTIONAL and "place 0" in err


def test_iam_run_sort_error(files):
    assert run("iam", "run", files("s.iam", "alphabet: #0 #H\nC(z, y) = z\n"))[0] == cli.EXIT_SORT


def test_iam_run_strict(files):
    text = ("alphabet: #0 #1 #H\n((y = o{0} & z = #0) | (!(y = o{0}) & "
            "((A u. E v. (u <= v & C(v, o{0}) = #1) & z = #1) | "
            "(!(A u. E v. (u <= v & C(v, o{0}) = #1)) & z = #0))))\n")
    path = files("l.iam", text)
    code, out, _ = run("iam", "run", path, "--bound", "w+1")
    assert code == cli.EXIT_BOUND and "certified=no" in out
    assert run("--strict", "iam", "run", path, "--bound", "w+1")[0] == cli.EXIT_UNCERTIFIED
    assert run("iam", "run", path, "--bound", "w+1", "--strict")[0] == cli.EXIT_UNCERTIFIED


def test_eval(files):
    pre = files("e.pre", "alphabet: #0 #1 #H\nlength: w\n")
    code, out, _ = run("eval", files("lim.lc", PHI_LIM_TEXT), pre, "--tau", "w")
    assert code == 0 and out == "1 certified\n"
    fin = files("f.pre", "alphabet: #0 #1 #H\nlength: 3\nt=2 place=0 sym=#1\n")
    code, out, _ = run("eval", files("c.lc", "C(o{2}, o{0}) = s"), fin, "--tau", "3", "--env", "s=#1")
    assert out == "1 certified\n"


def test_eval_errors(files):
    pre = files("e.pre", "alphabet: #0 #1 #H\nlength: 4\n")
    assert run("eval", files("u.lc", "E x. C(x, y) = #1"), pre, "--tau", "4")[0] == cli.EXIT_UNBOUND
    assert run("eval", files("p.lc", "C(0) = 1"), pre, "--tau", "4")[0] == cli.EXIT_SYNTAX
    assert run("eval", files("v.lc", "x = x"), pre, "--tau", "4", "--env", "x")[0] == cli.EXIT_USAGE


def test_crosscheck_files(files):
    a = files("blinker.otm", corpus.get("blinker").text)
    b = files("halt_now.otm", corpus.get("halt_now").text)
    code, out, _ = run("--canonical", "crosscheck", a, b, "--bound", "w+5",
                       "--checkpoints", "0,1,w,w+1", "--tape-bound", "w+3", "--jobs", "2")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "program=blinker ok=yes checkpoints=4 agree=4"
    assert "tape-transcript=agree" in lines
    assert any(line.startswith("program=halt_now ok=yes") for line in lines)
    assert lines[-1] == "summary programs=2 ok=2"
    again = run("--canonical", "crosscheck", a, b, "--bound", "w+5",
                "--checkpoints", "0,1,w,w+1", "--tape-bound", "w+3")[1]
    assert again == out


def test_crosscheck_needs_programs():
    assert run("crosscheck")[0] == cli.EXIT_USAGE


def test_status_table_is_total():
    codes = [c for _, c in cli.ERROR_STATUS]
    assert set(codes) <= set(range(14))
    assert len({cli.EXIT_BOUND, cli.EXIT_ACCEL, cli.EXIT_SYNTAX, cli.EXIT_SORT, cli.EXIT_UNBOUND,
                cli.EXIT_UNCERTIFIED, cli.EXIT_NOT_FUNCTIONAL, cli.EXIT_UNSUPPORTED,
                cli.EXIT_DIVERGENCE, cli.EXIT_MALFORMED, cli.EXIT_IO}) == 11
    assert cli.status_for(RuntimeError()) == cli.EXIT_INTERNAL
