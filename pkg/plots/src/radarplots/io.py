"""CSV readers for the sweep summary and phase-error CDF tables."""

import csv
from dataclasses import dataclass

from .errors import EmptyCsv, SchemaMismatch

SUMMARY_COLUMNS = ("p", "method", "mean_pd", "mean_sinr_db", "trial_count")
CDF_COLUMNS = ("p", "method", "e_deg", "cdf")


@dataclass(frozen=True)
class SummaryTable:
    """Rows of (p, method, mean_pd, mean_sinr_db, trial_count) in file
    order."""

    rows: tuple

    def curves(self, y_column: str):
        """(method, xs, ys) per method, in first-appearance order, with
        points in file order.  xs is p; ys the requested column."""
        order, grouped = [], {}
        for row in self.rows:
            if row["method"] not in grouped:
                order.append(row["method"])
                grouped[row["method"]] = []
            grouped[row["method"]].append((row["p"], row[y_column]))
        return [(m, [x for x, _ in grouped[m]], [y for _, y in grouped[m]])
                for m in order]


@dataclass(frozen=True)
class CdfTable:
    """Rows of (p, method, e_deg, cdf) in file order."""

    rows: tuple

    def curves(self):
        """(label, xs, ys) per (p, method) pair, in first-appearance
        order, with points in file order."""
        order, grouped = [], {}
        for row in self.rows:
            key = (row["p"], row["method"])
            if key not in grouped:
                order.append(key)
                grouped[key] = []
            grouped[key].append((row["e_deg"], row["cdf"]))
        return [(f"{m}, p={p:g}",
                 [x for x, _ in grouped[(p, m)]],
                 [y for _, y in grouped[(p, m)]])
                for p, m in order]


def _check_header(found, expected, path):
    if found is None:
        raise EmptyCsv(f"{path}: no header row")
    for col in expected:
        if col not in found:
            raise SchemaMismatch(f"{path}: missing column {col!r}")
    for col in found:
        if col not in expected:
            raise SchemaMismatch(f"{path}: unexpected column {col!r}")
    if tuple(found) != tuple(expected):
        raise SchemaMismatch(
            f"{path}: column order {found} != expected {list(expected)}")


def _cell(row, column, line_no, path, convert):
    try:
        return convert(row[column])
    except (ValueError, TypeError) as exc:
        raise SchemaMismatch(
            f"{path}:{line_no}: column {column!r}: {exc}") from exc


def _read_rows(path, expected, converters):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(header, expected, path)
        rows = []
        for line_no, raw in enumerate(reader, start=2):
            if len(raw) != len(expected):
                raise SchemaMismatch(
                    f"{path}:{line_no}: expected {len(expected)} cells, "
                    f"got {len(raw)}")
            named = dict(zip(expected, raw))
            rows.append({col: _cell(named, col, line_no, path, conv)
                         for col, conv in converters.items()})
    if not rows:
        raise EmptyCsv(f"{path}: no data rows")
    return tuple(rows)


def read_summary_csv(path) -> SummaryTable:
    converters = {"p": float, "method": str, "mean_pd": float,
                  "mean_sinr_db": float, "trial_count": int}
    return SummaryTable(_read_rows(path, SUMMARY_COLUMNS, converters))


def read_cdf_csv(path) -> CdfTable:
    converters = {"p": float, "method": str, "e_deg": float, "cdf": float}
    return CdfTable(_read_rows(path, CDF_COLUMNS, converters))
