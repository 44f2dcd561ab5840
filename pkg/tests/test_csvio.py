import numpy as np
import pytest

from mrma.csvio import DatasetFormatError, format_value, load_dataset_csv, read_csv, write_csv


class TestFormat:
    def test_full_precision(self):
        x = 0.1 + 0.2
        assert float(format_value(x)) == x

    def test_infinities(self):
        assert format_value(float("inf")) == "inf"
        assert format_value(float("-inf")) == "-inf"

    def test_bool_and_int(self):
        assert format_value(True) == "1"
        assert format_value(7) == "7"


class TestWriteRead:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "out" / "data.csv"
        write_csv(path, ["a", "b"], [(1, 2.5), (3, float("inf"))],
                  {"seed": 42, "version": "0.1.0"})
        meta, header, rows = read_csv(path)
        assert meta == {"seed": "42", "version": "0.1.0"}
        assert header == ["a", "b"]
        assert rows == [["1", "2.5"], ["3", "inf"]]

    def test_lf_line_endings(self, tmp_path):
        path = write_csv(tmp_path / "x.csv", ["a"], [(1,)], {"seed": 0})
        raw = path.read_bytes()
        assert b"\r" not in raw
        assert raw.startswith(b"# seed=0\n")


class TestLoadDataset:
    def write(self, tmp_path, text):
        path = tmp_path / "data.csv"
        path.write_text(text)
        return path

    def test_three_rows(self, tmp_path):
        path = self.write(tmp_path, "x1,x2,y\n1,2,1\n3,4,-1\n5,6,1\n")
        features, labels = load_dataset_csv(path)
        assert len(features) == 3
        assert labels == [1, -1, 1]

    def test_zero_one_labels_mapped(self, tmp_path):
        path = self.write(tmp_path, "x1,y\n0.5,0\n0.25,1\n")
        _, labels = load_dataset_csv(path)
        assert labels == [-1, 1]

    def test_bad_label_names_line(self, tmp_path):
        path = self.write(tmp_path, "x1,y\n0.5,1\n0.25,2\n")
        with pytest.raises(DatasetFormatError, match="line 3"):
            load_dataset_csv(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = self.write(tmp_path, "x1,x2,y\n1,2,1\n3,1\n")
        with pytest.raises(DatasetFormatError, match="line 3"):
            load_dataset_csv(path)

    def test_non_numeric_cell_rejected(self, tmp_path):
        path = self.write(tmp_path, "x1,y\nfoo,1\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset_csv(path)

    def test_missing_header_rejected(self, tmp_path):
        path = self.write(tmp_path, "1,2,1\n")
        with pytest.raises(DatasetFormatError):
            load_dataset_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_dataset_csv(tmp_path / "absent.csv")

    def test_write_then_read_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        X = rng.uniform(-1, 1, size=(20, 3))
        y = rng.choice([-1, 1], size=20)
        rows = [(*X[i], int(y[i])) for i in range(20)]
        path = write_csv(tmp_path / "gen.csv", ["x1", "x2", "x3", "y"], rows)
        features, labels = load_dataset_csv(path)
        np.testing.assert_allclose(np.asarray(features), X, rtol=0, atol=0)
        assert labels == y.tolist()
