import pytest

from mrvae.core.exceptions import FormatError
from mrvae.evaluation.curves import Provenance, RDCurve, RDPoint
from mrvae.io.results import emit_history_csv, emit_rd_csv, read_rd_csv
from mrvae.training.loop import HistoryRow


class TestRdCsv:
    def test_header_only(self, tmp_path):
        path = tmp_path / "rd.csv"
        emit_rd_csv(RDCurve([]), path)
        assert path.read_text() == "beta,rate,distortion,elbo,au\n"

    def test_three_points(self, tmp_path):
        path = tmp_path / "nested" / "rd.csv"
        curve = RDCurve(
            [RDPoint(0.1, 5.0, 1.0, 6.0, 3), RDPoint(1.0, 2.5, 2.0, 4.5, 2), RDPoint(10.0, 0.0, 4.0, 4.0, None)]
        )
        emit_rd_csv(curve, path)
        lines = path.read_text().splitlines()
        assert lines[1] == "0.1,5,1,6,3"
        assert lines[3] == "10,0,4,4,"
        back = read_rd_csv(path, Provenance.ANALYTIC)
        assert back.points == curve.points
        assert back.provenance is Provenance.ANALYTIC

    def test_no_temporary_files_left(self, tmp_path):
        emit_rd_csv(RDCurve([RDPoint(1.0, 1.0, 1.0)]), tmp_path / "rd.csv")
        assert [p.name for p in tmp_path.iterdir()] == ["rd.csv"]

    def test_bad_header(self, tmp_path):
        path = tmp_path / "rd.csv"
        path.write_text("beta,rate\n1,2\n")
        with pytest.raises(FormatError):
            read_rd_csv(path)

    def test_short_row(self, tmp_path):
        path = tmp_path / "rd.csv"
        path.write_text("beta,rate,distortion,elbo,au\n1,2\n")
        with pytest.raises(FormatError):
            read_rd_csv(path)


def test_history_csv(tmp_path):
    path = tmp_path / "history.csv"
    emit_history_csv([HistoryRow(1, 0, 0.5, 10.0, 2.0, 9.0)], path)
    assert path.read_text().splitlines() == ["step,epoch,beta,loss,rate,distortion", "1,0,0.5,10,2,9"]
