"""
CSV output for rate-distortion curves and training histories.

Files are written to a temporary sibling and renamed into place.
"""

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Optional

from mrvae.core.exceptions import FormatError
from mrvae.evaluation.curves import Provenance, RDCurve, RDPoint

RD_HEADER = ["beta", "rate", "distortion", "elbo", "au"]
HISTORY_HEADER = ["step", "epoch", "beta", "loss", "rate", "distortion"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.9g}"


def write_atomic(path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def _render(header, rows: Iterable[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_rd_csv(curve: RDCurve, path) -> None:
    rows = ([p.beta, p.rate, p.distortion, p.elbo_beta1, p.au] for p in curve.points)
    write_atomic(path, _render(RD_HEADER, rows))


def read_rd_csv(path, provenance: Optional[Provenance] = None) -> RDCurve:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != RD_HEADER:
            raise FormatError(f"{path}: expected header {','.join(RD_HEADER)}, got {header}")
        points = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(RD_HEADER):
                raise FormatError(f"{path}: line {line_no} has {len(row)} fields")
            beta, rate, distortion, elbo, au = row
            points.append(
                RDPoint(
                    float(beta),
                    float(rate),
                    float(distortion),
                    float(elbo) if elbo else None,
                    int(au) if au else None,
                )
            )
    return RDCurve(points, provenance or Provenance.MRVAE)


def emit_history_csv(history, path) -> None:
    rows = ([h.step, h.epoch, h.beta, h.loss, h.rate, h.distortion] for h in history)
    write_atomic(path, _render(HISTORY_HEADER, rows))
