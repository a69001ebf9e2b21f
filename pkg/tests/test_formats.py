import io

import numpy as np
import pytest

from gazeforge import FixationSet, FormatError, SaliencyMap
from gazeforge.formats import (
    decode_png,
    encode_gray_png,
    map_from_png_bytes,
    map_to_png_bytes,
    read_fixation_csv,
    read_mixture_json,
    read_smap,
    smap_from_bytes,
    smap_to_bytes,
    write_fixation_csv,
    write_mixture_json,
    write_smap,
)

from conftest import random_map, random_mixture


class TestSmap:
    def test_round_trip_bit_exact(self, rng):
        m = random_map(rng, 13, 7)
        payload = smap_to_bytes(m)
        again = smap_to_bytes(smap_from_bytes(payload))
        assert payload == again

    def test_header_layout(self):
        m = SaliencyMap(np.array([[1.0, 2.0]], dtype=np.float32))
        payload = smap_to_bytes(m)
        assert payload[:4] == b"SMAP"
        assert payload[4:8] == (1).to_bytes(4, "little")
        assert payload[8:12] == (2).to_bytes(4, "little")  # width
        assert payload[12:16] == (1).to_bytes(4, "little")  # height
        assert np.frombuffer(payload, dtype="<f4", offset=16).tolist() == [1.0, 2.0]

    def test_truncated_rejected(self, rng):
        payload = smap_to_bytes(random_map(rng, 4, 4))
        with pytest.raises(FormatError):
            smap_from_bytes(payload[:-1])

    def test_bad_magic_rejected(self):
        with pytest.raises(FormatError):
            smap_from_bytes(b"NOPE" + b"\x00" * 20)

    def test_file_round_trip(self, rng, tmp_path):
        m = random_map(rng, 5, 9)
        write_smap(m, tmp_path / "m.smap")
        back = read_smap(tmp_path / "m.smap")
        assert np.array_equal(back.values, m.values)


class TestPng:
    def test_gray_round_trip(self, rng):
        gray = rng.integers(0, 256, size=(11, 17)).astype(np.uint8)
        decoded = decode_png(encode_gray_png(gray))
        assert decoded.shape == (11, 17, 1)
        assert np.array_equal(decoded[:, :, 0], gray)

    def test_encoding_deterministic(self, rng):
        gray = rng.integers(0, 256, size=(8, 8)).astype(np.uint8)
        assert encode_gray_png(gray) == encode_gray_png(gray.copy())

    def test_cross_check_against_pillow(self, rng):
        PIL = pytest.importorskip("PIL.Image")
        gray = rng.integers(0, 256, size=(9, 14)).astype(np.uint8)
        img = PIL.open(io.BytesIO(encode_gray_png(gray)))
        assert np.array_equal(np.asarray(img), gray)

    def test_decode_pillow_rgb(self, rng):
        PIL = pytest.importorskip("PIL.Image")
        rgb = rng.integers(0, 256, size=(6, 5, 3)).astype(np.uint8)
        buf = io.BytesIO()
        PIL.fromarray(rgb, "RGB").save(buf, "PNG")
        decoded = decode_png(buf.getvalue())
        assert decoded.shape == (6, 5, 3)
        assert np.array_equal(decoded, rgb)

    def test_map_png_import_scale(self):
        gray = np.array([[0, 128, 255]], dtype=np.uint8)
        m = map_from_png_bytes(encode_gray_png(gray))
        assert np.allclose(m.values, [[0.0, 128 / 255, 1.0]])

    def test_map_png_export_hits_255_at_max(self):
        m = SaliencyMap(np.array([[0.0, 0.4]]))
        decoded = decode_png(map_to_png_bytes(m))
        assert decoded[0, 1, 0] == 255
        assert decoded[0, 0, 0] == 0


class TestMixtureJsonFile:
    def test_round_trip(self, rng, tmp_path):
        spec = random_mixture(rng)
        write_mixture_json(spec, tmp_path / "spec.json")
        back = read_mixture_json(tmp_path / "spec.json")
        assert len(back) == len(spec)
        for a, b in zip(spec.components, back.components):
            assert a.mean == b.mean
            assert np.array_equal(a.cov, b.cov)

    def test_bad_sigma_names_field(self, tmp_path):
        (tmp_path / "bad.json").write_text(
            '{"canvas":{"w":8,"h":8},"gaussians":[{"w":1,"mu":[1,1],"sigma":[[1,2],[2,1]]}]}'
        )
        with pytest.raises(FormatError, match=r"gaussians\[0\].sigma"):
            read_mixture_json(tmp_path / "bad.json")


class TestFixationCsv:
    def test_round_trip(self, tmp_path):
        fs = FixationSet(
            records=(("a", 0.0, 1.25, 2.5), ("b", 10.0, 3.0, 4.0)), display_ppd=40.0
        )
        write_fixation_csv(fs, tmp_path / "f.csv")
        back = read_fixation_csv(tmp_path / "f.csv", display_ppd=40.0)
        assert back.records == fs.records

    def test_header_enforced(self, tmp_path):
        (tmp_path / "f.csv").write_text("a,b,c,d\n")
        with pytest.raises(FormatError):
            read_fixation_csv(tmp_path / "f.csv", display_ppd=40.0)
