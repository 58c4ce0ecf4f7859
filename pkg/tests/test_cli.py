import io
import re
import subprocess
import sys
from pathlib import Path

import pytest

from tmkit.cli import main
from tmkit.events import coverage
from tmkit.fixtures import NAMES, path

GOLDEN = Path(__file__).parent / "golden"


def tm(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", NAMES)
def test_fixtures_validate(name):
    code, out, err = tm("validate", path(name))
    assert code == 0 and out.startswith("ok:") and err == ""


def test_missing_file_is_a_usage_error():
    code, _, err = tm("validate", "/nonexistent")
    assert code == 2 and "cannot read" in err


def test_flipped_flow_is_reported(tmp_path):
    text = path("smart_factory").read_text()
    good = "flow Factory.Container.arrive -> Factory.Container.accepted;"
    bad = "flow Factory.Container.accepted -> Factory.Container.arrive;"
    target = tmp_path / "broken.tm"
    target.write_text(text.replace(good, bad))
    code, _, err = tm("validate", target)
    assert code == 1
    line = text[:text.index(good)].count("\n") + 1
    assert re.search(rf"broken\.tm:{line}:\d+: error\[FLOW_ILLEGAL\]", err)


def test_parse_errors_exit_one(tmp_path):
    target = tmp_path / "junk.tm"
    target.write_text("model M { thimac }")
    code, _, err = tm("validate", target)
    assert code == 1 and "PARSE_ERROR" in err


def test_usage_errors():
    assert tm()[0] == 2
    assert tm("frobnicate", path("cat_mat"))[0] == 2
    assert tm("export", path("cat_mat"), "--kind", "svg")[0] == 2
    assert tm("simulate", path("cat_mat"), "--budget", "0")[0] == 2
    assert tm("--help")[0] == 0


def test_events_listing(broker):
    code, out, _ = tm("events", path("loan_broker"))
    assert code == 0
    listed = re.findall(r"^(E\d+)  ", out, re.M)
    assert len(listed) >= 18 and "E18" in listed
    cov = coverage(broker.model, broker.events)
    assert f"coverage: {len(cov.covered)}/{len(cov.covered) + len(cov.uncovered)} actions" in out
    assert "  E12 -repeat-> E7" in out
    assert "  E1 -> E2" in out


def test_events_on_model_without_events(tmp_path):
    target = tmp_path / "bare.tm"
    target.write_text("model M { thimac T { create c; process p; flow T.c -> T.p; } }")
    code, out, _ = tm("events", target)
    assert code == 0
    assert out.splitlines()[0] == "coverage: 0/2 actions (0.0%)"
    assert out.splitlines()[1:] == ["chronology:"]


def test_simulate_production_lane():
    code, out, err = tm("simulate", path("smart_factory"), "--scenario", "no_violation")
    assert code == 0 and err == ""
    assert "  E6: fired x1" in out and "  E7: fired x1" in out
    assert "  E15: negative" in out and "  E9: negative" in out
    assert "occurrences: 11" in out


def test_simulate_missing_choice():
    code, _, err = tm("simulate", path("smart_factory"), "--scenario", "missing_supervisor")
    assert code == 1
    assert "error[MISSING_CHOICE]" in err and "smart_factory.tm:46:" in err


def test_simulate_budget_and_unknown_scenario():
    code, _, err = tm("simulate", path("loan_broker"), "--scenario", "lender_rejects_once",
                      "--budget", "3")
    assert code == 1 and "BUDGET" in err
    code, _, err = tm("simulate", path("loan_broker"), "--scenario", "sunny")
    assert code == 1 and "UNKNOWN_SCENARIO" in err


def test_simulate_empty(tmp_path):
    target = tmp_path / "empty.tm"
    target.write_text("model M { thimac T { } }")
    code, out, _ = tm("simulate", target)
    assert code == 0 and "occurrences: 0" in out


def test_golden_trace(tmp_path):
    golden = (GOLDEN / "loan_broker.happy.trace").read_bytes()
    for i in range(2):
        out = tmp_path / f"run{i}.trace"
        code, _, _ = tm("simulate", path("loan_broker"), "--scenario", "happy", "--trace", out)
        assert code == 0
        assert out.read_bytes() == golden


def test_trace_goes_to_stdout_without_a_file():
    _, out, _ = tm("simulate", path("cat_mat"), "--scenario", "cat_moves")
    assert out.startswith("tick=1 event=E1 region=R")


def test_export_chronology_file(tmp_path):
    target = tmp_path / "chron.dot"
    code, out, _ = tm("export", path("loan_broker"), "--kind", "chronology", "--out", target)
    assert code == 0 and str(target) in out
    assert '"E12" -> "E7" [style=dashed, label="repeat"];' in target.read_text()


def test_export_default_name(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, _ = tm("export", path("traffic"), "--kind", "dynamic")
    assert code == 0
    assert (tmp_path / "Traffic.dynamic.dot").exists()


def test_export_empty_model_to_stdout(tmp_path):
    target = tmp_path / "empty.tm"
    target.write_text("model M {\n}\n")
    code, out, _ = tm("export", target, "--out", "-")
    assert code == 0
    assert out == 'digraph "M" {\n  subgraph "cluster_M" {\n    label="M";\n  }\n}\n'


def test_stats():
    code, out, _ = tm("stats", path("cat_mat"))
    assert code == 0
    stats = dict(line.strip().split(": ") for line in out.splitlines())
    assert stats["thimacs"] == "2" and stats["actions"] == "9" and stats["storages"] == "2"
    assert stats["events"] == "4" and stats["scenarios"] == "3"


def test_commands_are_repeatable():
    for cmd in ("validate", "events", "stats"):
        assert tm(cmd, path("smart_factory")) == tm(cmd, path("smart_factory"))


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "tmkit.cli", "validate", str(path("traffic"))],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0 and done.stdout.startswith("ok:")
