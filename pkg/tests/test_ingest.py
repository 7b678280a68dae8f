"""CSV ingestion: ordering, replayable prefix, malformed-row policy."""

import io

import pytest

from streamvb.ingest import CsvStream, IngestError


def _stream(text, required=("y", "x"), numeric=("y", "x"), prefix=2):
    return CsvStream(io.StringIO(text), required, numeric, prefix_size=prefix)


class TestBasics:
    def test_three_rows_in_order(self):
        s = _stream("y,x\n1,10\n2,20\n3,30\n", prefix=10)
        recs = list(s.all_records())
        assert [r["y"] for r in recs] == [1.0, 2.0, 3.0]
        assert [r["x"] for r in recs] == [10.0, 20.0, 30.0]

    def test_missing_header_fatal(self):
        with pytest.raises(IngestError):
            _stream("")

    def test_missing_column_fatal(self):
        with pytest.raises(IngestError, match="missing mandated"):
            _stream("y,z\n1,2\n")

    def test_string_group_column_kept(self):
        s = CsvStream(io.StringIO("y,g\n1,site_a\n"), ("y", "g"), ("y",), 5)
        rec = next(s.all_records())
        assert rec["g"] == "site_a"
        assert rec["y"] == 1.0


class TestPrefixReplay:
    def test_prefix_identical_both_passes(self):
        s = _stream("y,x\n1,10\n2,20\n3,30\n4,40\n", prefix=3)
        first = list(s.prefix())
        second = list(s.prefix())
        assert first == second
        assert len(first) == 3

    def test_tail_continues_after_prefix(self):
        s = _stream("y,x\n1,10\n2,20\n3,30\n4,40\n", prefix=2)
        assert [r["y"] for r in s.prefix()] == [1.0, 2.0]
        assert [r["y"] for r in s.tail()] == [3.0, 4.0]

    def test_short_stream_yields_short_prefix(self):
        s = _stream("y,x\n1,10\n", prefix=5)
        assert len(s.prefix()) == 1


class TestMalformedRows:
    def test_bad_row_skipped_and_counted(self, capsys):
        s = _stream("y,x\n1,10\nnot_a_number,20\n3,30\n", prefix=10)
        recs = list(s.all_records())
        assert [r["y"] for r in recs] == [1.0, 3.0]
        assert s.skipped == 1
        assert "skipping" in capsys.readouterr().err

    def test_empty_value_skipped(self):
        s = _stream("y,x\n1,10\n2,\n3,30\n", prefix=10)
        assert [r["y"] for r in s.all_records()] == [1.0, 3.0]

    def test_abort_after_consecutive_budget(self):
        bad = "y,x\n" + "bad,1\n" * 100 + "1,1\n"
        s = _stream(bad, prefix=200)
        with pytest.raises(IngestError, match="consecutive"):
            list(s.all_records())

    def test_budget_resets_on_good_row(self):
        rows = ("bad,1\n" * 50 + "1,1\n") * 3
        s = _stream("y,x\n" + rows, prefix=500)
        recs = list(s.all_records())
        assert len(recs) == 3
        assert s.skipped == 150
