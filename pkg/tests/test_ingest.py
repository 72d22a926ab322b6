import numpy as np
import pytest

from jetseg.errors import (
    ConfigError,
    EmptyDatasetError,
    FormatError,
    LabelError,
)
from jetseg.ingest import (
    Calibration,
    LabelMask,
    TemperatureField,
    load_config,
    load_label_mask_pgm,
    load_temperature_csv,
    parse_calibration,
    parse_experiment_meta,
    save_config,
    save_label_mask_pgm,
    save_temperature_csv,
    split_dataset,
)

from jetseg_testutil import random_mask


class TestTemperatureCsv:
    def test_basic_parse(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("300,300\n800,1200\n")
        f = load_temperature_csv(p)
        assert f.rows == 2 and f.cols == 2
        assert f.values.ravel().tolist() == [300, 300, 800, 1200]
        assert f.frame_id == "f"

    def test_ragged_rows(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("300,300\n800\n")
        with pytest.raises(FormatError):
            load_temperature_csv(p)

    def test_negative_kelvin(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("300,-5\n")
        with pytest.raises(ValueError, match="row 0, col 1"):
            load_temperature_csv(p)

    def test_non_numeric(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("300,abc\n")
        with pytest.raises(ValueError, match="row 0, col 1"):
            load_temperature_csv(p)

    def test_non_finite(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("300,inf\n")
        with pytest.raises(ValueError):
            load_temperature_csv(p)

    def test_roundtrip_random_fields(self, tmp_path, rng):
        for i in range(20):
            rows, cols = int(rng.integers(1, 12)), int(rng.integers(1, 12))
            values = rng.uniform(1.0, 2000.0, size=(rows, cols))
            f = TemperatureField(values=values, frame_id=f"r{i}")
            p = tmp_path / f"r{i}.csv"
            save_temperature_csv(f, p)
            g = load_temperature_csv(p)
            assert np.array_equal(f.values, g.values)


class TestPgm:
    def test_roundtrip_random_masks(self, tmp_path, rng):
        for i in range(30):
            mask = random_mask(rng)
            p = tmp_path / f"m{i}.pgm"
            save_label_mask_pgm(mask, p)
            again = load_label_mask_pgm(p)
            assert np.array_equal(mask.labels, again.labels)

    def test_byte_stable_header_and_body(self, tmp_path):
        mask = LabelMask(labels=np.array([[3]], dtype=np.uint8))
        p = tmp_path / "one.pgm"
        save_label_mask_pgm(mask, p)
        assert p.read_bytes() == b"P5\n1 1\n255\n\x03"

    def test_bad_label_value(self, tmp_path):
        p = tmp_path / "bad.pgm"
        p.write_bytes(b"P5\n1 1\n255\n\x07")
        with pytest.raises(LabelError):
            load_label_mask_pgm(p)

    def test_wrong_magic(self, tmp_path):
        p = tmp_path / "bad.pgm"
        p.write_bytes(b"P2\n1 1\n255\n\x01")
        with pytest.raises(FormatError):
            load_label_mask_pgm(p)

    def test_wrong_maxval(self, tmp_path):
        p = tmp_path / "bad.pgm"
        p.write_bytes(b"P5\n1 1\n65535\n\x00\x01")
        with pytest.raises(FormatError):
            load_label_mask_pgm(p)

    def test_comment_tolerant_header(self, tmp_path):
        p = tmp_path / "c.pgm"
        p.write_bytes(b"P5\n# a comment\n2 1\n255\n\x01\x02")
        mask = load_label_mask_pgm(p)
        assert mask.labels.tolist() == [[1, 2]]

    def test_truncated_body(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P5\n2 2\n255\n\x01")
        with pytest.raises(FormatError):
            load_label_mask_pgm(p)


class TestSplit:
    def test_paper_arithmetic_201(self):
        ids = [f"img{i}" for i in range(201)]
        s = split_dataset(ids, (0.8, 0.1, 0.1), seed=7)
        assert (len(s.train_ids), len(s.val_ids), len(s.test_ids)) == (161, 20, 20)

    def test_all_train(self):
        ids = [str(i) for i in range(10)]
        s = split_dataset(ids, (1.0, 0.0, 0.0), seed=0)
        assert len(s.train_ids) == 10 and not s.val_ids and not s.test_ids

    def test_deterministic(self):
        ids = [str(i) for i in range(50)]
        assert split_dataset(ids, seed=3) == split_dataset(ids, seed=3)

    def test_empty_ids(self):
        with pytest.raises(EmptyDatasetError):
            split_dataset([], (0.8, 0.1, 0.1), seed=0)

    def test_partition_property(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 120))
            ids = [f"x{i}" for i in range(n)]
            f_val = float(rng.uniform(0, 0.5))
            f_test = float(rng.uniform(0, 0.5))
            f_train = 1.0 - f_val - f_test
            s = split_dataset(ids, (f_train, f_val, f_test), seed=int(rng.integers(1e6)))
            groups = [set(s.train_ids), set(s.val_ids), set(s.test_ids)]
            assert groups[0] | groups[1] | groups[2] == set(ids)
            assert sum(len(g) for g in groups) == n

    def test_bad_fractions(self):
        with pytest.raises(ConfigError):
            split_dataset(["a"], (0.5, 0.4, 0.2), seed=0)


class TestConfig:
    def test_roundtrip_and_comments(self, tmp_path):
        p = tmp_path / "cal.cfg"
        p.write_text("# camera A\nmeters_per_pixel = 0.05\nnozzle_row = 230\nnozzle_col=64\n\n")
        cfg = load_config(p)
        cal = parse_calibration(cfg)
        assert cal == Calibration(0.05, 230, 64)

    def test_save_load(self, tmp_path):
        p = tmp_path / "c.cfg"
        save_config({"a": "1", "b": "x"}, p)
        assert load_config(p) == {"a": "1", "b": "x"}

    def test_missing_key(self):
        with pytest.raises(ConfigError):
            parse_calibration({"meters_per_pixel": "0.05"})

    def test_malformed_line(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("just some words\n")
        with pytest.raises(ConfigError):
            load_config(p)


class TestExperimentMeta:
    def test_parse_campaign_entry(self):
        cfg = {
            "pipe_outlet_diameter": "0.01275",
            "wind_speed": "0.4",
            "ambient_temperature": "28",
            "fuel_velocity_min": "27",
            "fuel_velocity_max": "255",
            "image_count": "129",
        }
        meta = parse_experiment_meta(cfg)
        assert meta.pipe_outlet_diameter == 0.01275
        assert meta.fuel_velocity_range == (27.0, 255.0)
        assert meta.image_count == 129

    def test_diameter_domain(self):
        cfg = {
            "pipe_outlet_diameter": "1.5",
            "wind_speed": "0.4",
            "ambient_temperature": "28",
            "fuel_velocity_min": "27",
            "fuel_velocity_max": "255",
            "image_count": "129",
        }
        with pytest.raises(ConfigError):
            parse_experiment_meta(cfg)


class TestTypes:
    def test_temperature_invariants(self):
        with pytest.raises(ValueError):
            TemperatureField(values=np.array([[300.0, -1.0]]))
        with pytest.raises(ValueError):
            TemperatureField(values=np.array([[np.nan, 300.0]]))

    def test_mask_label_alphabet(self):
        with pytest.raises(LabelError):
            LabelMask(labels=np.array([[5]], dtype=np.uint8))

    def test_calibration_positive_scale(self):
        with pytest.raises(ConfigError):
            Calibration(meters_per_pixel=0.0, nozzle_row=0, nozzle_col=0)
