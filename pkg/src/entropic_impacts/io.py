"""CSV/JSON readers and writers for series, masks, stores and pipeline artifacts.

Ingest format::

    date,variable,region,member,scenario,value

with ISO-8601 dates and ``scenario`` in {forced, counterfactual}. A store is
a directory holding ``manifest.json`` and one wide CSV per (variable, region)
under ``pairs/``, with columns ``date, forced_1 .. forced_E,
counterfactual_1 .. counterfactual_E``.

Artifact files start with ``# config_hash: <hex>`` header lines; JSON
artifacts carry a ``config_hash`` field instead.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
import re
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .changepoint import FeatureInterval
from .core import EnsemblePair, RegionalSeries, RegionMask, Scenario, align_pair
from .entropy import EntropySeries
from .exceptions import DataError, IngestError
from .stats import ImpactRecord

__all__ = [
    "INGEST_HEADER",
    "read_ingest_csv",
    "write_ingest_csv",
    "read_mask_csv",
    "write_store",
    "read_store",
    "pair_filename",
    "header_lines",
    "write_text",
    "entropy_csv",
    "changepoints_csv",
    "intervals_json",
    "impacts_csv",
    "read_impacts_csv",
    "path_csv",
]

INGEST_HEADER = ("date", "variable", "region", "member", "scenario", "value")
MASK_HEADER = ("column", "region", "weight")
IMPACT_HEADER = ("variable", "region", "start_date", "end_date", "mean_diff", "ci_low", "ci_high", "score")


def fmt(x: float) -> str:
    """Shortest round-tripping decimal text of a float."""
    return repr(float(x))


def _parse_date(text: str, where: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise IngestError(f"{where}: invalid ISO-8601 date {text!r}") from None


def _data_rows(lines: Iterable[str]):
    """CSV rows with their 1-based file line numbers, skipping ``#`` comments and blank lines."""
    numbered = ((k, line) for k, line in enumerate(lines, start=1)
                if line.strip() and not line.lstrip().startswith("#"))
    numbers = []

    def feed():
        for k, line in numbered:
            numbers.append(k)
            yield line

    for row in csv.reader(feed()):
        yield numbers[-1], row


def _check_header(rows, expected: Sequence[str], source: str):
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise IngestError(f"{source}: empty file") from None
    if tuple(h.strip() for h in header) != tuple(expected):
        raise IngestError(f"{source} line {lineno}: header must be {','.join(expected)}, got {','.join(header)}")


def read_ingest_csv(sources: Sequence[str | Path] | str | Path) -> dict[tuple[str, str], EnsemblePair]:
    """Parse, validate and group ingest CSV files into one pair per (variable, region).

    Errors name the file and line: malformed fields, non-finite values,
    duplicate ``(variable, region, date, member, scenario)`` keys, gaps in a
    daily series and unpaired members.
    """
    if isinstance(sources, (str, Path)):
        sources = [sources]
    table: dict[tuple, dict[dt.date, float]] = {}
    seen: dict[tuple, str] = {}
    for src in sources:
        name = str(src)
        with open(src, newline="") as fh:
            rows = _data_rows(fh)
            _check_header(rows, INGEST_HEADER, name)
            for lineno, row in rows:
                where = f"{name} line {lineno}"
                if len(row) != len(INGEST_HEADER):
                    raise IngestError(f"{where}: expected {len(INGEST_HEADER)} fields, got {len(row)}")
                date_s, variable, region, member_s, scenario_s, value_s = (c.strip() for c in row)
                date = _parse_date(date_s, where)
                if not variable or not region:
                    raise IngestError(f"{where}: empty variable or region")
                try:
                    member = int(member_s)
                except ValueError:
                    raise IngestError(f"{where}: member {member_s!r} is not an integer") from None
                if member < 1:
                    raise IngestError(f"{where}: member index must be >= 1, got {member}")
                try:
                    scenario = Scenario.parse(scenario_s)
                except DataError as exc:
                    raise IngestError(f"{where}: {exc}") from None
                if not value_s:
                    raise IngestError(f"{where}: missing value")
                try:
                    value = float(value_s)
                except ValueError:
                    raise IngestError(f"{where}: value {value_s!r} is not a number") from None
                if not math.isfinite(value):
                    raise IngestError(f"{where}: missing or non-finite value {value_s!r}")
                key = (variable, region, scenario, member)
                full = key + (date,)
                if full in seen:
                    raise IngestError(
                        f"{where}: duplicate row for {variable}/{region} {scenario.value} member {member} "
                        f"on {date} (first seen at {seen[full]})")
                seen[full] = where
                table.setdefault(key, {})[date] = value

    members: dict[tuple[str, str], tuple[list, list]] = {}
    for (variable, region, scenario, member), values in sorted(table.items(), key=lambda kv: (
            kv[0][0], kv[0][1], kv[0][2].value, kv[0][3])):
        dates = sorted(values)
        span = (dates[-1] - dates[0]).days + 1
        if span != len(dates):
            raise IngestError(
                f"{variable}/{region} {scenario.value} member {member}: {span - len(dates)} missing day(s) "
                f"between {dates[0]} and {dates[-1]}")
        series = RegionalSeries(variable, region, scenario, member, dates[0], [values[d] for d in dates])
        f, c = members.setdefault((variable, region), ([], []))
        (f if scenario is Scenario.FORCED else c).append(series)
    return {key: align_pair(f, c) for key, (f, c) in sorted(members.items())}


def write_ingest_csv(pairs: Iterable[EnsemblePair], path: str | Path) -> None:
    """Write pairs in the long ingest format (rows ordered by series, scenario, member, date)."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(INGEST_HEADER) + "\n")
        for pair in pairs:
            dates = [d.isoformat() for d in pair.dates()]
            for scenario, arr in ((Scenario.FORCED, pair.forced), (Scenario.COUNTERFACTUAL, pair.counterfactual)):
                for e, row in enumerate(arr, start=1):
                    prefix = f",{_csv_field(pair.variable)},{_csv_field(pair.region)},{e},{scenario.value},"
                    fh.write("".join(d + prefix + fmt(x) + "\n" for d, x in zip(dates, row.tolist())))


def _csv_field(text: str) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow([text])
    return buf.getvalue()


def read_mask_csv(path: str | Path, labels: Sequence[str] | None = None) -> RegionMask:
    """Read a ``column,region,weight`` mask; an empty weight means 1.0.

    Columns must be exactly ``0 .. C-1``. Region labels keep first-appearance
    order unless ``labels`` is given.
    """
    name = str(path)
    cols: dict[int, tuple[str, float]] = {}
    with open(path, newline="") as fh:
        rows = _data_rows(fh)
        _check_header(rows, MASK_HEADER, name)
        for lineno, row in rows:
            where = f"{name} line {lineno}"
            if len(row) not in (2, 3):
                raise IngestError(f"{where}: expected column,region,weight")
            try:
                col = int(row[0])
            except ValueError:
                raise IngestError(f"{where}: column {row[0]!r} is not an integer") from None
            weight_s = row[2].strip() if len(row) == 3 else ""
            try:
                weight = float(weight_s) if weight_s else 1.0
            except ValueError:
                raise IngestError(f"{where}: weight {weight_s!r} is not a number") from None
            if col in cols:
                raise IngestError(f"{where}: column {col} assigned twice")
            cols[col] = (row[1].strip(), weight)
    if sorted(cols) != list(range(len(cols))):
        raise IngestError(f"{name}: mask columns must be 0..{len(cols) - 1} without gaps")
    order = list(labels) if labels is not None else list(dict.fromkeys(cols[c][0] for c in sorted(cols)))
    index = {r: k for k, r in enumerate(order)}
    try:
        assignment = np.array([index[cols[c][0]] for c in range(len(cols))], dtype=int)
    except KeyError as exc:
        raise IngestError(f"{name}: region {exc.args[0]!r} not among the given labels") from None
    weights = np.array([cols[c][1] for c in range(len(cols))])
    return RegionMask(tuple(order), assignment, weights)


def pair_filename(variable: str, region: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9_.-]+", "_", f"{variable}__{region}")
    return f"{slug}.csv"


def write_store(pairs: Mapping[tuple[str, str], EnsemblePair], directory: str | Path,
                config_hash: str | None = None) -> Path:
    """Persist pairs as wide CSVs plus ``manifest.json``; returns the manifest path."""
    root = Path(directory)
    (root / "pairs").mkdir(parents=True, exist_ok=True)
    entries = []
    for key in sorted(pairs):
        pair = pairs[key]
        fname = pair_filename(*key)
        E = pair.ensemble_size
        cols = ["date"] + [f"forced_{e}" for e in range(1, E + 1)] + [f"counterfactual_{e}" for e in range(1, E + 1)]
        both = np.concatenate([pair.forced, pair.counterfactual]).T.tolist()
        lines = [",".join(cols)]
        lines += [d.isoformat() + "," + ",".join(map(fmt, row)) for d, row in zip(pair.dates(), both)]
        write_text(root / "pairs" / fname, "\n".join(lines) + "\n", config_hash)
        entries.append({"variable": key[0], "region": key[1], "file": f"pairs/{fname}",
                        "ensemble_size": E, "length": pair.length,
                        "start_date": pair.start_date.isoformat()})
    manifest = {"format": "entropic-impacts-store/1", "pairs": entries}
    if config_hash is not None:
        manifest["config_hash"] = config_hash
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def read_store(directory: str | Path) -> dict[tuple[str, str], EnsemblePair]:
    root = Path(directory)
    try:
        manifest = json.loads((root / "manifest.json").read_text())
    except FileNotFoundError:
        raise DataError(f"{root} is not a dataset store (no manifest.json)") from None
    pairs = {}
    for entry in manifest["pairs"]:
        lines = [x for x in (root / entry["file"]).read_text().splitlines() if x and not x.startswith("#")]
        body = np.array([x.split(",") for x in lines[1:]], dtype=str).reshape(len(lines) - 1, -1)
        E = int(entry["ensemble_size"])
        values = body[:, 1:].astype(float).T
        if values.shape != (2 * E, int(entry["length"])):
            raise DataError(f"{entry['file']}: expected {2 * E} member columns of length {entry['length']}")
        start = dt.date.fromisoformat(entry["start_date"])
        if dt.date.fromisoformat(body[0, 0]) != start:
            raise DataError(f"{entry['file']}: first date {body[0, 0]} differs from manifest {start}")
        key = (entry["variable"], entry["region"])
        pairs[key] = EnsemblePair(key[0], key[1], start, values[:E], values[E:])
    return pairs


def header_lines(config_hash: str | None, extra: Sequence[str] = ()) -> str:
    lines = [] if config_hash is None else [f"# config_hash: {config_hash}"]
    lines += [f"# {x}" for x in extra]
    return "".join(line + "\n" for line in lines)


def write_text(path: str | Path, body: str, config_hash: str | None = None, extra: Sequence[str] = ()) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(header_lines(config_hash, extra) + body)


def _table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def entropy_csv(s: EntropySeries) -> str:
    dates = s.midpoint_dates() if s.start_date is not None else list(map(int, s.midpoints))
    return _table(("window", "midpoint_date", "entropy"),
                  ((k, str(d), float(v)) for k, (d, v) in enumerate(zip(dates, s.values), start=1)))


def changepoints_csv(changepoints: Sequence[int], params, start_date: dt.date | None) -> str:
    rows = []
    for i in changepoints:
        day = params.midpoint(i)
        rows.append((i, (start_date + dt.timedelta(days=day - 1)).isoformat() if start_date else day))
    return _table(("nu_index", "date"), rows)


def intervals_json(intervals: Mapping[tuple[str, str], Sequence[FeatureInterval]],
                   config_hash: str | None = None) -> str:
    doc = {}
    if config_hash is not None:
        doc["config_hash"] = config_hash
    doc["intervals"] = [
        {"variable": k[0], "region": k[1],
         "intervals": [{"start_index": iv.start_index, "end_index": iv.end_index,
                        "start_date": iv.start_date.isoformat() if iv.start_date else None,
                        "end_date": iv.end_date.isoformat() if iv.end_date else None}
                       for iv in ivs]}
        for k, ivs in sorted(intervals.items())
    ]
    return json.dumps(doc, indent=2) + "\n"


def _impact_row(r: ImpactRecord):
    return (r.variable, r.region, r.start_date.isoformat(), r.end_date.isoformat(),
            r.mean_diff, r.ci_low, r.ci_high, r.score)


def impacts_csv(records: Iterable[ImpactRecord]) -> str:
    return _table(IMPACT_HEADER, map(_impact_row, records))


def path_csv(records: Iterable[ImpactRecord]) -> str:
    """Source-to-final path table, one row per node with its step number."""
    return _table(("step",) + IMPACT_HEADER, ((k,) + _impact_row(r) for k, r in enumerate(records, start=1)))


def read_impacts_csv(path: str | Path, origins: Mapping[tuple[str, str], dt.date],
                     ci_level: float = 0.99) -> list[ImpactRecord]:
    """Rebuild impact records from an impacts CSV.

    ``origins`` gives each series' first date so day indices can be recovered.
    The standard error is reconstructed from the score, or from the CI when
    the score is zero or infinite.
    """
    name = str(path)
    out = []
    with open(path, newline="") as fh:
        rows = _data_rows(fh)
        _check_header(rows, IMPACT_HEADER, name)
        for lineno, row in rows:
            where = f"{name} line {lineno}"
            if len(row) != len(IMPACT_HEADER):
                raise IngestError(f"{where}: expected {len(IMPACT_HEADER)} fields")
            variable, region = row[0], row[1]
            start, end = _parse_date(row[2], where), _parse_date(row[3], where)
            try:
                mean, lo, hi, score = map(float, row[4:])
            except ValueError:
                raise IngestError(f"{where}: non-numeric impact statistic") from None
            origin = origins.get((variable, region))
            if origin is None:
                raise IngestError(f"{where}: series {variable}/{region} is not in the store")
            iv = FeatureInterval((start - origin).days + 1, (end - origin).days + 1, start, end)
            se = mean / score if score not in (0.0,) and math.isfinite(score) else 0.0
            out.append(ImpactRecord(variable, region, iv, mean, se, lo, hi, score, ci_level))
    return out
