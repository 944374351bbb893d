import numpy as np
import pytest

from eegconn import (EegRecording, SynthSpec, TrialLabels, load_csv,
                     load_recording, save_recording, segment, synth_generate)
from eegconn.errors import (EmptySegmentation, FormatError, LayoutError,
                            SpecError)
from eegconn.io import MAGIC
from eegconn.layout import layout_from_names


def two_channel_rec():
    layout = layout_from_names(["C3", "C4"])
    samples = np.array([[1.0, 2.0, 3.0, 4.0],
                        [5.0, 6.0, 7.0, 8.0]], dtype=np.float32)
    return EegRecording(layout=layout, sample_rate=4.0, samples=samples)


def test_round_trip_bit_exact(tmp_path):
    rec = two_channel_rec()
    path = tmp_path / "rec.eegr"
    save_recording(rec, path)
    back = load_recording(path)
    assert back.layout.names == rec.layout.names
    assert back.sample_rate == rec.sample_rate
    assert back.samples.tobytes() == rec.samples.tobytes()


def test_round_trip_with_labels(tmp_path):
    rec = EegRecording(layout=two_channel_rec().layout, sample_rate=4.0,
                       samples=two_channel_rec().samples,
                       labels=TrialLabels(3, 17, 6.5, 4.25))
    path = tmp_path / "rec.eegr"
    save_recording(rec, path)
    back = load_recording(path)
    assert back.labels == TrialLabels(3, 17, 6.5, 4.25)


def test_hand_written_two_channel_file(tmp_path):
    rec = two_channel_rec()
    path = tmp_path / "rec.eegr"
    save_recording(rec, path)
    back = load_recording(path)
    assert back.samples.shape == (2, 4)
    np.testing.assert_array_equal(
        back.samples, [[1, 2, 3, 4], [5, 6, 7, 8]])


def test_60s_trial_has_7680_samples():
    spec = SynthSpec(n_channels=32, sample_rate=128.0, duration_s=60.0)
    rec = synth_generate(spec, seed=0)
    assert rec.n_samples == 7680


def test_channel_count_mismatch_rejected(tmp_path):
    rec = two_channel_rec()
    path = tmp_path / "rec.eegr"
    save_recording(rec, path)
    raw = bytearray(path.read_bytes())
    raw[8] = 3  # header now declares 3 channels, body still has 2
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        load_recording(path)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "rec.eegr"
    path.write_bytes(b"NOPE" + b"\x00" * 40)
    with pytest.raises(FormatError):
        load_recording(path)


def test_truncated_payload_rejected(tmp_path):
    rec = two_channel_rec()
    path = tmp_path / "rec.eegr"
    save_recording(rec, path)
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(FormatError):
        load_recording(path)


def test_unknown_electrode_label_rejected(tmp_path):
    rec = two_channel_rec()
    path = tmp_path / "rec.eegr"
    save_recording(rec, path)
    raw = path.read_bytes()
    assert MAGIC in raw
    path.write_bytes(raw.replace(b"C3,C4", b"Q7,C4"))
    with pytest.raises(LayoutError):
        load_recording(path)


def test_csv_import(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text("C3,C4\n1,5\n2,6\n3,7\n4,8\n")
    rec = load_csv(path, sample_rate=4.0)
    np.testing.assert_array_equal(
        rec.samples, [[1, 2, 3, 4], [5, 6, 7, 8]])


def test_csv_ragged_row_rejected(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text("C3,C4\n1,5\n2\n")
    with pytest.raises(FormatError):
        load_csv(path, sample_rate=4.0)


# --- segmentation ---------------------------------------------------------

def test_paper_segment_count():
    spec = SynthSpec(n_channels=2, sample_rate=128.0, duration_s=60.0)
    rec = synth_generate(spec, seed=0)
    segs = segment(rec, window_s=3.0, overlap_s=2.5)
    assert len(segs) == 115


def test_single_exact_fit():
    spec = SynthSpec(n_channels=2, sample_rate=128.0, duration_s=3.0)
    rec = synth_generate(spec, seed=0)
    segs = segment(rec, window_s=3.0, overlap_s=2.5)
    assert len(segs) == 1
    assert segs[0].start_sample == 0


def test_hand_enumerated_starts():
    # 10 s @ 10 Hz, window 4 s, overlap 2 s: hop = 20 samples
    spec = SynthSpec(n_channels=2, sample_rate=10.0, duration_s=10.0)
    rec = synth_generate(spec, seed=0)
    segs = segment(rec, window_s=4.0, overlap_s=2.0)
    assert [s.start_sample for s in segs] == [0, 20, 40, 60]


def test_window_longer_than_recording():
    spec = SynthSpec(n_channels=2, sample_rate=10.0, duration_s=1.0)
    rec = synth_generate(spec, seed=0)
    with pytest.raises(EmptySegmentation):
        segment(rec, window_s=2.0, overlap_s=0.0)


def test_starts_strictly_increasing_constant_hop():
    spec = SynthSpec(n_channels=2, sample_rate=128.0, duration_s=20.0)
    rec = synth_generate(spec, seed=1)
    segs = segment(rec, window_s=2.0, overlap_s=1.25)
    starts = [s.start_sample for s in segs]
    hops = np.diff(starts)
    assert np.all(hops == hops[0]) and hops[0] > 0
    assert all(s.start_sample + s.length_samples <= rec.n_samples
               for s in segs)


# --- synthetic generation -------------------------------------------------

def test_synth_pure_in_spec_and_seed():
    spec = SynthSpec(n_channels=4, sample_rate=64.0, duration_s=2.0,
                     kind="blocks", blocks=[[0, 1]])
    a = synth_generate(spec, seed=7)
    b = synth_generate(spec, seed=7)
    np.testing.assert_array_equal(a.samples, b.samples)
    c = synth_generate(spec, seed=8)
    assert not np.array_equal(a.samples, c.samples)


def test_synth_invalid_spec():
    with pytest.raises(SpecError):
        SynthSpec(n_channels=0, sample_rate=64.0, duration_s=2.0)
    with pytest.raises(SpecError):
        SynthSpec(n_channels=2, sample_rate=64.0, duration_s=-1.0)


def test_correlation_blocks_recoverable():
    spec = SynthSpec(n_channels=8, sample_rate=128.0, duration_s=3.0,
                     kind="blocks", blocks=[[0, 1, 2, 3], [4, 5, 6, 7]],
                     noise_sigma=0.1)
    rec = synth_generate(spec, seed=0)
    x = rec.samples.astype(float)
    # oracle: direct population-moment correlation
    def corr(i, k):
        dx = x[i] - x[i].mean()
        dy = x[k] - x[k].mean()
        return np.mean(dx * dy) / (np.std(x[i]) * np.std(x[k]))
    assert corr(0, 3) > 0.8
    assert abs(corr(0, 4)) < 0.3


def test_phase_coupled_identical_oscillators():
    from eegconn import analytic_phase, plv
    spec = SynthSpec(n_channels=2, sample_rate=128.0, duration_s=2.0,
                     kind="phase", freq_hz=10.0, phase_offsets=[0.0, 0.0],
                     noise_sigma=0.0)
    rec = synth_generate(spec, seed=0)
    ph = analytic_phase(rec.samples.astype(float))
    assert plv(ph[0], ph[1]) == pytest.approx(1.0, abs=1e-6)


def test_causal_chain_directionality():
    from eegconn import te
    spec = SynthSpec(n_channels=3, sample_rate=128.0, duration_s=20.0,
                     kind="chain", chain_edges=[(0, 1)], noise_sigma=0.2)
    rec = synth_generate(spec, seed=3)
    x = rec.samples.astype(float)
    te_chain = te(x[0], x[1], bins=8)
    te_control = te(x[0], x[2], bins=8)  # channel 2 is independent noise
    assert te_chain > te_control
