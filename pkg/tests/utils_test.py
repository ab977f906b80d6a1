"""Tests for record flattening and emission."""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pytest

from ab_riesz.utils import read_records, save_summary, to_record, write_records


@dataclass(frozen=True)
class _Row:
    name: str
    value: float
    point: tuple[float, ...]
    details: dict[str, float] = field(default_factory=dict)


class TestRecords:
    """Test the flattening of results into records."""

    @staticmethod
    def test_dataclass() -> None:
        """Tuples are joined and nested mappings are prefixed."""
        record = to_record(_Row("D", np.float64(0.5), (1.0, 2.0), {"low": 3.0}))
        if record != {"name": "D", "value": 0.5, "point": "1.0;2.0", "details.low": 3.0}:
            error_message = f"Unexpected record {record}"
            raise AssertionError(error_message)
        if type(record["value"]) is not float:
            error_message = "NumPy scalars must become Python scalars"
            raise AssertionError(error_message)

    @staticmethod
    def test_rejects_other_objects() -> None:
        """Only dataclass instances and mappings are flattened."""
        with pytest.raises(TypeError):
            to_record([1.0, 2.0])

    @staticmethod
    def test_union_header(tmp_path: Path) -> None:
        """The header is the union of keys and missing cells stay empty."""
        path = tmp_path / "rows.csv"
        write_records([{"a": 1, "b": 0.25}, {"a": 2, "c": "x"}], path)
        rows = read_records(path)
        if rows != [{"a": "1", "b": "0.25", "c": ""}, {"a": "2", "b": "", "c": "x"}]:
            error_message = f"Unexpected rows {rows}"
            raise AssertionError(error_message)

    @staticmethod
    def test_standard_output(capsys: pytest.CaptureFixture[str]) -> None:
        """Without a path the records go to standard output."""
        write_records([{"j": 3, "value": 0.1}])
        if capsys.readouterr().out != "j,value\n3,0.1\n":
            error_message = "Unexpected standard output"
            raise AssertionError(error_message)

    @staticmethod
    def test_summary(tmp_path: Path) -> None:
        """Complex numbers and arrays are stored as JSON objects and lists."""
        path = tmp_path / "summary.json"
        save_summary({"value": 1 - 2j, "norms": np.array([0.5, 1.0]), "ok": True}, path)
        content = json.loads(path.read_text())
        expected = {"value": {"real": 1.0, "imag": -2.0}, "norms": [0.5, 1.0], "ok": True}
        if content != expected:
            error_message = f"Unexpected summary {content}"
            raise AssertionError(error_message)

    @staticmethod
    def test_floats_read_back_exactly(tmp_path: Path) -> None:
        """Floats use at most 17 significant digits and read back to the same value."""
        path = tmp_path / "floats.csv"
        values = [0.1, 0.1 + 0.2, 1.0 / 3.0, 2.0**-40, 6.02214076e23]
        write_records([{"value": value} for value in values], path)
        cells = [row["value"] for row in read_records(path)]
        if [float(cell) for cell in cells] != values:
            error_message = f"Values changed on the way through the file: {cells}"
            raise AssertionError(error_message)
        digits = [len(cell.split("e")[0].replace(".", "").lstrip("0")) for cell in cells]
        if cells[0] != "0.1" or max(digits) > 17:  # noqa: PLR2004
            error_message = f"Unexpected formatting {cells}"
            raise AssertionError(error_message)
