import numpy as np
import pytest

from eegconn import (PAIR_SETS, canonical_layout, concentrativeness,
                     import_tensors, load_order)
from eegconn.cli import main
from eegconn.metrics import pairs_to_indices
from eegconn.ordering import ElectrodeOrder


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_preds(path, outcomes):
    """outcomes: list of (true, predicted)."""
    lines = ["instance_id,true,predicted"]
    lines += [f"{i},{t},{p}" for i, (t, p) in enumerate(outcomes)]
    path.write_text("\n".join(lines) + "\n")


def test_synth_and_extract_pipeline(tmp_path, capsys):
    rec_path = tmp_path / "trial.eegr"
    code, out, _ = run(capsys, "synth", "--kind", "blocks",
                       "--channels", "32", "--duration", "5",
                       "--blocks", "0-15;16-31", "--seed", "1",
                       "--out", str(rec_path))
    assert code == 0
    cten = tmp_path / "t.cten"
    code, out, _ = run(capsys, "extract", "--in", str(rec_path),
                       "--measure", "plv", "--order", "dist",
                       "--out", str(cten))
    assert code == 0
    ts = import_tensors(cten)
    assert ts[0].shape == (32, 32, 10)
    manifest = (tmp_path / "t.cten.manifest.txt").read_text()
    rows = [l for l in manifest.splitlines() if not l.startswith("#")]
    assert len(rows) == len(ts)
    order = load_order(str(cten) + ".order.txt", canonical_layout().names)
    assert sorted(order.perm) == list(range(32))


def test_extract_segment_count_matches_manifest(tmp_path, capsys):
    rec_path = tmp_path / "trial.eegr"
    run(capsys, "synth", "--channels", "4", "--duration", "10",
        "--blocks", "0-1;2-3", "--out", str(rec_path))
    cten = tmp_path / "t.cten"
    code, _, _ = run(capsys, "extract", "--in", str(rec_path),
                     "--measure", "pcc", "--order", "data-global",
                     "--restarts", "4", "--out", str(cten))
    assert code == 0
    # 10 s, 3 s window, 2.5 s overlap -> floor((1280-384)/64)+1 = 15
    assert len(import_tensors(cten)) == 15


def test_extract_missing_input(tmp_path, capsys):
    code, _, errtxt = run(capsys, "extract", "--in",
                          str(tmp_path / "nope.eegr"),
                          "--out", str(tmp_path / "t.cten"))
    assert code == 2
    assert "nope.eegr" in errtxt


def test_concentrate_matches_library(tmp_path, capsys):
    code, out, _ = run(capsys, "concentrate", "--measure", "PCC",
                       "--side", "low", "-s", "3", "--format", "csv")
    assert code == 0
    value = float(out.strip().splitlines()[-1].split(",")[-1])
    names = canonical_layout().names
    o = ElectrodeOrder(perm=tuple(range(32)), strategy="identity")
    pairs = pairs_to_indices(PAIR_SETS["PCC"].low, names)
    assert value == pytest.approx(concentrativeness(o, pairs, 3, 32),
                                  abs=1e-6)


def test_concentrate_s1_is_one(capsys):
    code, out, _ = run(capsys, "concentrate", "--measure", "PLV",
                       "--side", "high", "-s", "1", "--format", "csv")
    assert code == 0
    value = float(out.strip().splitlines()[-1].split(",")[-1])
    assert value == 1.0


def test_stats_constructed_counts(tmp_path, capsys):
    a, b = tmp_path / "sysa.csv", tmp_path / "sysb.csv"
    outcomes_a = [(0, 0)] * 10 + [(0, 1)] * 2 + [(0, 0)] * 3
    outcomes_b = [(0, 1)] * 10 + [(0, 0)] * 2 + [(0, 0)] * 3
    write_preds(a, outcomes_a)
    write_preds(b, outcomes_b)
    code, out, _ = run(capsys, "stats", str(a), str(b), "--format", "csv")
    assert code == 0
    row = out.strip().splitlines()[-1].split(",")
    assert float(row[2]) == pytest.approx(5.3333, abs=1e-4)
    assert (int(row[4]), int(row[5])) == (10, 2)


def test_stats_identical_files_marked(tmp_path, capsys):
    a, b = tmp_path / "sysa.csv", tmp_path / "sysb.csv"
    write_preds(a, [(0, 0)] * 6)
    write_preds(b, [(0, 0)] * 6)
    code, out, _ = run(capsys, "stats", str(a), str(b))
    assert code == 0
    assert "no-discordance" in out


def test_stats_three_files_three_cells(tmp_path, capsys):
    paths = []
    for name in ("s1", "s2", "s3"):
        p = tmp_path / f"{name}.csv"
        write_preds(p, [(0, i % 2) for i in range(8)])
        paths.append(str(p))
    code, out, _ = run(capsys, "stats", *paths, "--format", "csv")
    assert code == 0
    assert len(out.strip().splitlines()) == 4  # header + 3 pairs


def test_stats_misaligned_ids(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_preds(a, [(0, 0)] * 4)
    b.write_text("instance_id,true,predicted\n9,0,1\n8,0,0\n7,0,0\n6,0,1\n")
    code, _, errtxt = run(capsys, "stats", str(a), str(b))
    assert code == 3
    assert "align" in errtxt


def test_report_groups(tmp_path, capsys):
    pred = tmp_path / "pred.csv"
    write_preds(pred, [(0, 0), (0, 1), (1, 1), (1, 1)])
    labels = tmp_path / "labels.csv"
    labels.write_text("instance_id,subject,video,valence\n"
                      "0,1,1,2.0\n1,1,2,8.0\n2,2,1,2.0\n3,2,2,8.0\n")
    code, out, _ = run(capsys, "report", "--pred", str(pred),
                       "--labels", str(labels), "--group-by", "subject",
                       "--format", "csv")
    assert code == 0
    rows = dict(l.split(",", 1) for l in out.strip().splitlines()[1:])
    assert rows["1"].endswith("0.5000")
    assert rows["2"].endswith("0.0000")


def test_config_file_flags_win(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("channels=4\nduration=3\nseed=9\n")
    out_path = tmp_path / "r.eegr"
    code, _, _ = run(capsys, "synth", "--config", str(cfg),
                     "--duration", "4", "--out", str(out_path))
    assert code == 0
    from eegconn import load_recording
    rec = load_recording(out_path)
    assert rec.layout.n_electrodes == 4       # from config
    assert rec.n_samples == 4 * 128           # flag overrode config
