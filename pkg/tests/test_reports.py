import json

import pytest

from distances import DistanceKind
from reports import build_payload, emit, format_value, render_csv, to_json, write_csv


class TestFormatValue:
    @pytest.mark.parametrize("value, expected", [
        (0.1234567891234, "0.123456789"),
        (3515.861234567, "3515.86123"),
        (True, "true"),
        (None, ""),
        (7, "7"),
        (DistanceKind.GPI, "gpi"),
        ([0.01, 0.02], "0.01;0.02"),
    ])
    def test_cells(self, value, expected):
        assert format_value(value) == expected


class TestCsv:
    def test_header_and_order(self):
        text = render_csv([{"m": 1, "exact": 0.5}, {"m": 2, "exact": 0.25}], ["m", "exact"])
        assert text == "m,exact\n1,0.5\n2,0.25\n"

    def test_empty_rows(self):
        with pytest.raises(ValueError):
            render_csv([])

    def test_write_creates_directories(self, tmp_path):
        path = write_csv([{"a": 1}], tmp_path / "nested" / "out.csv")
        assert path.read_text() == "a\n1\n"


class TestJson:
    def test_payload_round_trips(self):
        value = 0.1 + 0.2
        payload = json.loads(to_json(build_payload("budget", {"total": value, "regime": DistanceKind.OPERATOR_NORM})))
        assert payload["schema_version"] == 1
        assert payload["command"] == "budget"
        assert payload["total"] == value
        assert payload["regime"] == "opnorm"

    def test_int_keys_and_sets(self):
        payload = json.loads(to_json({"per_k": {2: 3}, "kept": frozenset({3, 2})}))
        assert payload == {"per_k": {"2": 3}, "kept": [2, 3]}

    def test_emit_to_stdout_and_file(self, capsys, tmp_path):
        emit("hello\n")
        assert capsys.readouterr().out == "hello\n"
        emit("x", tmp_path / "sub" / "out.txt")
        assert (tmp_path / "sub" / "out.txt").read_text() == "x"
