"""CSV formats shared by the CLI and the benchmark.

* spectrum: header ``k,re,im``
* time-domain signal: header ``n,value``
* per-bin PSD: header ``k,sv``

Lines starting with ``#`` are provenance comments and are skipped on read.
Floats are written with ``repr`` (shortest round-trip form).
"""

from __future__ import annotations

import csv
import io as _io
import json

import numpy as np

from .exceptions import InvalidInputError

SPECTRUM_HEADER = ("k", "re", "im")
TIME_HEADER = ("n", "value")
PSD_HEADER = ("k", "sv")


class CsvFormatError(InvalidInputError):
    def __init__(self, message, path=None, line=None):
        where = f"{path}:{line}: " if line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)
        self.line = line


def fmt(x):
    return repr(float(x))


def provenance_lines(tool, version, config):
    """``#``-prefixed header lines: tool/version and the resolved config as JSON."""
    return [f"# {tool} {version}", "# config: " + json.dumps(config, sort_keys=True)]


def _write(path, header, rows, comments=()):
    buf = _io.StringIO()
    for line in comments:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def write_spectrum(path, X, comments=()):
    X = np.asarray(X, dtype=np.complex128)
    _write(path, SPECTRUM_HEADER, ((k, fmt(v.real), fmt(v.imag)) for k, v in enumerate(X)), comments)


def write_time(path, x, comments=()):
    x = np.asarray(x, dtype=np.float64)
    _write(path, TIME_HEADER, ((n, fmt(v)) for n, v in enumerate(x)), comments)


def write_psd(path, sv, comments=()):
    _write(path, PSD_HEADER, ((k, fmt(v)) for k, v in enumerate(np.asarray(sv, float))), comments)


def write_rows(path, header, rows, comments=()):
    _write(path, header, rows, comments)


def read_table(path):
    """Return ``(header, rows)``; rows are ``(line_number, fields)``, comments skipped."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    header = None
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = next(csv.reader([line]))
        if header is None:
            header = tuple(f.strip() for f in fields)
            continue
        if len(fields) != len(header):
            raise CsvFormatError(f"expected {len(header)} fields, got {len(fields)}", path, lineno)
        rows.append((lineno, fields))
    if header is None:
        raise CsvFormatError("missing header", path)
    return header, rows


def _floats(path, rows, cols):
    out = np.empty((len(rows), len(cols)))
    for i, (lineno, fields) in enumerate(rows):
        try:
            idx = int(fields[0])
        except ValueError:
            raise CsvFormatError(f"bad index {fields[0]!r}", path, lineno) from None
        if idx != i:
            raise CsvFormatError(f"expected index {i}, got {idx}", path, lineno)
        for j, c in enumerate(cols):
            try:
                out[i, j] = float(fields[c])
            except ValueError:
                raise CsvFormatError(f"not a number: {fields[c]!r}", path, lineno) from None
    return out


def read_signal(path):
    """Read a spectrum or time-domain CSV; returns ``(kind, array)`` with kind ``"spectrum"`` or ``"time"``."""
    header, rows = read_table(path)
    if header == SPECTRUM_HEADER:
        vals = _floats(path, rows, (1, 2))
        return "spectrum", vals[:, 0] + 1j * vals[:, 1]
    if header == TIME_HEADER:
        return "time", _floats(path, rows, (1,))[:, 0]
    raise CsvFormatError(f"unrecognized header {','.join(header)}", path)


def read_psd(path):
    header, rows = read_table(path)
    if header != PSD_HEADER:
        raise CsvFormatError(f"expected header {','.join(PSD_HEADER)}", path)
    return _floats(path, rows, (1,))[:, 0]
