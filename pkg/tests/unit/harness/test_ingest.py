"""
Unit tests for CSV ingestion and export.

Purpose: Ensure observation tables parse exactly, report the first bad cell
by row and line, and round-trip through export without loss.
"""

import pytest

from src.harness.ingest import ColumnMapping, IngestError, export_csv, ingest_csv


def write_table(path, text: str):
    path.write_text(text, encoding="utf-8")
    return path


class TestIngestCsv:
    """Test ingest_csv."""

    def test_reads_labels_in_first_appearance_order(self, temp_dir):
        """Purpose: Verify labels become levels 1..K in the order they first appear."""
        path = write_table(
            temp_dir / "obs.csv",
            "y,a,x1,x2\n1.5,treated,0.1,2\n0.5,control,0.2,3\n2.5,treated,0.3,4\n",
        )
        data = ingest_csv(path)
        assert data.labels == ("treated", "control")
        assert data.a.tolist() == [1, 2, 1]
        assert data.x.shape == (3, 2)

    def test_explicit_level_order(self, temp_dir):
        path = write_table(temp_dir / "obs.csv", "y,a,x1,x2\n1,b,0,0\n2,a,0,0\n")
        data = ingest_csv(path, levels=("a", "b"))
        assert data.a.tolist() == [2, 1]

    def test_custom_columns(self, temp_dir):
        path = write_table(temp_dir / "obs.csv", "outcome,arm,age\n1.0,0,30\n2.0,1,40\n")
        data = ingest_csv(path, ColumnMapping("outcome", "arm", ("age",)))
        assert data.p == 1
        assert data.y.tolist() == [1.0, 2.0]

    def test_na_cell_reports_row_and_line(self, temp_dir):
        """Purpose: Verify a missing value is rejected with its row and file line."""
        path = write_table(temp_dir / "obs.csv", "y,a,x1,x2\n1,0,0,0\n2,1,NA,0\n")
        with pytest.raises(IngestError) as exc:
            ingest_csv(path)
        assert exc.value.code == "INGEST"
        assert exc.value.details["row"] == 2
        assert exc.value.details["line"] == 3
        assert exc.value.details["column"] == "x1"
        assert exc.value.details["value"] == "NA"

    def test_infinite_cell(self, temp_dir):
        path = write_table(temp_dir / "obs.csv", "y,a,x1,x2\ninf,0,0,0\n2,1,0,0\n")
        with pytest.raises(IngestError) as exc:
            ingest_csv(path)
        assert exc.value.details["column"] == "y"

    def test_empty_treatment(self, temp_dir):
        path = write_table(temp_dir / "obs.csv", "y,a,x1,x2\n1,0,0,0\n2,,0,0\n")
        with pytest.raises(IngestError) as exc:
            ingest_csv(path)
        assert exc.value.details["line"] == 3

    def test_missing_columns(self, temp_dir):
        path = write_table(temp_dir / "obs.csv", "y,a,x1\n1,0,0\n")
        with pytest.raises(IngestError) as exc:
            ingest_csv(path)
        assert exc.value.details["missing"] == ["x2"]

    def test_unknown_label(self, temp_dir):
        path = write_table(temp_dir / "obs.csv", "y,a,x1,x2\n1,0,0,0\n2,2,0,0\n")
        with pytest.raises(IngestError) as exc:
            ingest_csv(path, levels=("0", "1"))
        assert exc.value.details["unknown"] == ["2"]

    def test_level_without_units(self, temp_dir):
        """Purpose: Verify a configured level with no rows is rejected."""
        path = write_table(temp_dir / "obs.csv", "y,a,x1,x2\n1,0,0,0\n2,1,0,0\n")
        with pytest.raises(IngestError) as exc:
            ingest_csv(path, levels=("0", "1", "2"))
        assert exc.value.details["empty_levels"] == ["2"]

    def test_missing_file(self, temp_dir):
        with pytest.raises(IngestError):
            ingest_csv(temp_dir / "absent.csv")

    def test_duplicate_mapping(self):
        with pytest.raises(IngestError):
            ColumnMapping("y", "a", ("y",))


class TestExportCsv:
    """Test export_csv."""

    def test_round_trip(self, gaussian_data, temp_dir):
        """Purpose: Verify exported data re-ingests to an equal dataset."""
        path = export_csv(gaussian_data, temp_dir / "out" / "data.csv")
        assert path.read_text().splitlines()[0] == "y,a,x1,x2"
        assert ingest_csv(path, levels=gaussian_data.labels) == gaussian_data

    def test_mapping_width(self, gaussian_data, temp_dir):
        with pytest.raises(IngestError):
            export_csv(gaussian_data, temp_dir / "data.csv", ColumnMapping(covariates=("x1",)))
