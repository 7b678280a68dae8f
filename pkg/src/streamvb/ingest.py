"""Streaming CSV ingestion with a replayable prefix.

The first n_warm + n_valid records are buffered so the warm-up diagnostic
protocol can replay them; after acceptance the stream continues record by
record.  Malformed rows are skipped and counted, with an abort after 100
consecutive failures.
"""

from __future__ import annotations

import csv
import sys
from typing import Iterator

__all__ = ["IngestError", "CsvStream"]

MAX_CONSECUTIVE_BAD = 100


class IngestError(ValueError):
    pass


class CsvStream:
    """Comma-delimited UTF-8 source with a mandatory header row.

    ``numeric_columns`` are parsed to float; remaining required columns are
    kept as strings (e.g. group labels).
    """

    def __init__(self, source, required_columns, numeric_columns, prefix_size: int):
        self._own_handle = isinstance(source, str)
        if self._own_handle:
            self._handle = open(source, newline="", encoding="utf-8")
        elif source == sys.stdin:
            self._handle = source
        else:
            self._handle = source
        self._reader = csv.DictReader(self._handle)
        if self._reader.fieldnames is None:
            raise IngestError("input has no header row")
        missing = [c for c in required_columns if c not in self._reader.fieldnames]
        if missing:
            raise IngestError(f"input is missing mandated columns: {missing}")
        self.numeric_columns = tuple(numeric_columns)
        self.required_columns = tuple(required_columns)
        self.prefix_size = prefix_size
        self.skipped = 0
        self._prefix: list | None = None

    def _parse(self, raw: dict) -> dict:
        rec = {}
        for col in self.required_columns:
            value = raw.get(col)
            if value is None or value == "":
                raise ValueError(f"missing value for {col}")
            rec[col] = float(value) if col in self.numeric_columns else value
        return rec

    def _records(self) -> Iterator[dict]:
        consecutive_bad = 0
        for raw in self._reader:
            try:
                rec = self._parse(raw)
            except ValueError as exc:
                self.skipped += 1
                consecutive_bad += 1
                print(f"warning: skipping malformed row: {exc}", file=sys.stderr)
                if consecutive_bad >= MAX_CONSECUTIVE_BAD:
                    raise IngestError(
                        f"aborting after {MAX_CONSECUTIVE_BAD} consecutive malformed rows"
                    )
                continue
            consecutive_bad = 0
            yield rec

    def prefix(self) -> list:
        """The buffered first prefix_size records (reading them if needed)."""
        if self._prefix is None:
            self._prefix = []
            for rec in self._records():
                self._prefix.append(rec)
                if len(self._prefix) == self.prefix_size:
                    break
        return self._prefix

    def tail(self) -> Iterator[dict]:
        """Records after the buffered prefix, in file order."""
        self.prefix()
        yield from self._records()

    def all_records(self) -> Iterator[dict]:
        yield from self.prefix()
        yield from self.tail()

    def close(self):
        if self._own_handle:
            self._handle.close()
