import json

import pytest

from rigidchern.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out


def test_c1_class(capsys):
    code, rep, _ = run(capsys, "c1", "--space", "P2", "--twist", "3", "--p", "5", "--precision", "8")
    assert code == 0
    assert rep["class"] == 3 and rep["closed"] is True and rep["precision"] == 8
    for key in ("p", "N", "D", "seed", "precision_floor"):
        assert key in rep


def test_c1_trivial(capsys):
    code, rep, _ = run(capsys, "c1", "--space", "P1", "--twist", "0")
    assert code == 0 and rep["class"] == 0


def test_c1_perturbed(capsys):
    code, rep, _ = run(capsys, "c1", "--space", "P2", "--twist", "1", "--perturb", "--seed", "7")
    assert code == 0 and rep["class"] == 1 and rep["closed"]


def test_chern(capsys):
    code, rep, _ = run(capsys, "chern", "--base", "P2", "--twists", "1,2")
    assert code == 0
    assert [c[0] for c in rep["c"]] == ["1", "3", "2"]
    code, rep, _ = run(capsys, "chern", "--base", "P2", "--twists", "0,0")
    assert [c[0] for c in rep["c"]] == ["1", "0", "0"]
    code, rep, _ = run(capsys, "chern", "--base", "P1", "--twists", "1,1,1")
    assert [c[0] for c in rep["c"]] == ["1", "3", "0", "0"]
    code, rep, _ = run(capsys, "chern", "--base", "P2", "--twists=-1,2")
    assert [c[0] for c in rep["c"]] == ["1", "1", "-2"]


def test_verify_closure(capsys):
    code, rep, _ = run(capsys, "verify", "--suite", "closure", "--p", "3", "--seed", "1", "--cases", "100")
    assert code == 0
    assert rep["suites"]["closure"]["passed"] == 100


def test_verify_mpd(capsys):
    code, rep, _ = run(capsys, "verify", "--suite", "mpd", "--p", "2", "--level", "3")
    assert code == 0 and rep["pass"]


def test_verify_ranks(capsys):
    code, rep, _ = run(capsys, "verify", "--suite", "ranks", "--space", "P2")
    assert code == 0 and rep["ranks"] == [1, 0, 1, 0, 1]


def test_verify_all(capsys):
    code, rep, _ = run(capsys, "verify", "--suite", "all", "--cases", "3", "--space", "P1")
    assert code == 0 and rep["pass"]
    assert set(rep["suites"]) == {"closure", "gauge", "whitney", "frobenius", "mpd", "ranks"}


def test_determinism(capsys, monkeypatch):
    args = ("verify", "--suite", "gauge", "--cases", "4", "--seed", "3")
    main(list(args))
    first = capsys.readouterr().out
    monkeypatch.setenv("RIGIDCHERN_THREADS", "3")
    main(list(args))
    second = capsys.readouterr().out
    assert first == second


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code = main(["c1", "--space", "P1", "--twist", "2", "--out", str(target)])
    printed = capsys.readouterr().out
    assert code == 0
    assert target.read_text() == printed


@pytest.mark.parametrize(
    "argv",
    [
        ["c1", "--space", "P4"],
        ["c1", "--p", "4"],
        ["c1", "--precision", "0"],
        ["chern", "--base", "P2"],
        ["chern", "--base", "P2", "--twists", "1,2,3,4"],
        ["verify", "--suite", "mpd", "--level", "9"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--suite", "nope"])
    assert info.value.code == 2


def test_failed_verification_exits_1(capsys, monkeypatch):
    import rigidchern.cli as cli

    monkeypatch.setitem(cli.SUITE_RUNNERS, "closure", lambda cfg: [{"case": 0, "pass": False}])
    assert main(["verify", "--suite", "closure"]) == 1
