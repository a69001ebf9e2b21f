import numpy as np
import pytest

from gazeforge import (
    EmptySequenceError,
    FormatError,
    SaliencyMap,
    SaliencySequence,
    evaluate_sequence,
    normalize_to_distribution,
    read_sseq,
    smooth_temporal,
    write_sseq,
)
from gazeforge.video import sseq_from_bytes, sseq_to_bytes

from conftest import random_map


def seq_of(rng, n, w=8, h=8, fps=8.0):
    return SaliencySequence(frames=tuple(random_map(rng, w, h) for _ in range(n)), fps=fps)


class TestSaliencySequence:
    def test_requires_frames(self):
        with pytest.raises(EmptySequenceError):
            SaliencySequence(frames=(), fps=8.0)

    def test_uniform_dims_enforced(self, rng):
        with pytest.raises(Exception):
            SaliencySequence(frames=(random_map(rng, 8, 8), random_map(rng, 9, 8)), fps=8.0)


class TestSmoothTemporal:
    def test_alpha_one_identity(self, rng):
        seq = seq_of(rng, 4)
        out = smooth_temporal(seq, 1.0)
        for a, b in zip(out.frames, seq.frames):
            assert np.array_equal(a.values, b.values)

    def test_constant_sequence_fixed_point(self, rng):
        frame = random_map(rng)
        seq = SaliencySequence(frames=(frame,) * 5, fps=8.0)
        out = smooth_temporal(seq, 0.3)
        for f in out.frames:
            assert np.max(np.abs(f.values - frame.values)) < 1e-12

    def test_matches_hand_unrolled_recurrence(self, rng):
        seq = seq_of(rng, 3)
        out = smooth_temporal(seq, 0.5)
        f1, f2, f3 = (f.values for f in seq.frames)
        want2 = 0.5 * f2 + 0.5 * f1
        want3 = 0.5 * f3 + 0.5 * want2
        assert np.max(np.abs(out.frames[0].values - f1)) < 1e-12
        assert np.max(np.abs(out.frames[1].values - want2)) < 1e-12
        assert np.max(np.abs(out.frames[2].values - want3)) < 1e-12

    def test_preserves_distribution_mass(self, rng):
        frames = tuple(normalize_to_distribution(random_map(rng)) for _ in range(4))
        out = smooth_temporal(SaliencySequence(frames=frames, fps=8.0), 0.4)
        for f in out.frames:
            assert abs(f.total_mass - 1.0) < 1e-9


class TestEvaluateSequence:
    def test_identity(self, rng):
        seq = seq_of(rng, 4)
        ev = evaluate_sequence(seq, seq)
        assert all(abs(r.cc - 1.0) < 1e-9 for r in ev.per_frame)
        assert abs(ev.mean.cc - 1.0) < 1e-9
        assert ev.std.cc < 1e-12

    def test_aggregate_is_frame_mean(self, rng):
        a, b = seq_of(rng, 2), seq_of(rng, 2)
        ev = evaluate_sequence(a, b)
        for name in ("cc", "kl", "sim"):
            per = [getattr(r, name) for r in ev.per_frame]
            assert abs(getattr(ev.mean, name) - np.mean(per)) < 1e-12
            assert abs(getattr(ev.std, name) - np.std(per)) < 1e-12

    def test_length_mismatch_trims_with_warning(self, rng):
        a, b = seq_of(rng, 10), seq_of(rng, 8)
        with pytest.warns(UserWarning, match="length mismatch"):
            ev = evaluate_sequence(a, b)
        assert ev.frames_evaluated == 8
        assert ev.trimmed == 2


class TestSseqIO:
    def test_round_trip(self, rng, tmp_path):
        seq = seq_of(rng, 4, 6, 5, fps=12.0)
        write_sseq(seq, tmp_path / "s.sseq")
        back = read_sseq(tmp_path / "s.sseq")
        assert len(back) == 4 and back.fps == 12.0
        for a, b in zip(back.frames, seq.frames):
            assert np.array_equal(a.values, b.values)

    def test_round_trip_bit_exact(self, rng):
        payload = sseq_to_bytes(seq_of(rng, 3))
        assert sseq_to_bytes(sseq_from_bytes(payload)) == payload

    def test_hand_built_fixture(self):
        import struct

        smap = b"SMAP" + struct.pack("<III", 1, 2, 1) + struct.pack("<2f", 0.5, 1.0)
        payload = b"SSEQ" + struct.pack("<IIf", 1, 2, 4.0) + smap + smap
        seq = sseq_from_bytes(payload)
        assert len(seq) == 2 and seq.fps == 4.0
        assert seq.width == 2 and seq.height == 1
        assert seq.frames[0].values.tolist() == [[0.5, 1.0]]

    def test_truncated_names_frame(self, rng):
        payload = sseq_to_bytes(seq_of(rng, 3))
        with pytest.raises(FormatError, match="frame 2"):
            sseq_from_bytes(payload[:-5])

    def test_zero_frames_rejected(self):
        import struct

        payload = b"SSEQ" + struct.pack("<IIf", 1, 0, 8.0)
        with pytest.raises(FormatError):
            sseq_from_bytes(payload)
