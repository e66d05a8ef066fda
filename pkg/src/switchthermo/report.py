"""CSV and SVG writers for sweep results.

All writers are byte-deterministic and replace their target atomically.
"""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

from .experiments import SweepRow

CSV_HEADER = (
    "beta",
    "s",
    "lambda",
    "p",
    "u2",
    "i_bits",
    "i_bits_maxp",
    "coherence_cost_bits",
    "witness_distance",
    "notes",
)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".12g")


def atomic_write(path, data: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def write_table(header: Sequence[str], rows: Iterable[Sequence], path) -> Path:
    return atomic_write(path, _csv_text(header, rows))


def write_csv(rows: Iterable[SweepRow], path) -> Path:
    ordered = sorted(rows, key=SweepRow.sort_key)
    return write_table(
        CSV_HEADER,
        (
            (
                r.beta_label,
                r.s,
                r.lam,
                r.p,
                r.u2,
                r.i_bits,
                r.i_bits_maxp,
                r.coherence_cost_bits,
                r.witness_distance,
                r.notes,
            )
            for r in ordered
        ),
        path,
    )


def _parse_notes(notes: str) -> dict:
    out = {}
    for item in filter(None, notes.split(";")):
        key, _, value = item.partition("=")
        out[key] = float(value)
    return out


def read_csv(path) -> list[SweepRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            SweepRow(
                beta=float(d["beta"]),
                s=float(d["s"]),
                lam=float(d["lambda"]),
                p=float(d["p"]),
                u2=d["u2"],
                i_bits=float(d["i_bits"]),
                i_bits_maxp=float(d["i_bits_maxp"]),
                coherence_cost_bits=float(d["coherence_cost_bits"]),
                witness_distance=float(d["witness_distance"]) if d["witness_distance"] else None,
                extras=_parse_notes(d["notes"]),
            )
            for d in reader
        ]


# plotting

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
_W, _H = 720.0, 420.0
_LEFT, _RIGHT, _TOP, _BOTTOM = 70.0, 250.0, 30.0, 55.0


def _value(row: SweepRow, field: str) -> float:
    if field in row.extras:
        return row.extras[field]
    return getattr(row, field)


def _series_label(key, field: str, multi: bool) -> str:
    beta, lam, u2 = key
    label = f"beta={beta}, lambda={fmt(lam)}, {u2}"
    return f"{field}: {label}" if multi else label


def write_plot(
    rows: Sequence[SweepRow],
    path,
    fields: Sequence[str] = ("i_bits",),
    reference: Optional[str] = None,
    title: str = "",
) -> Path:
    """Line chart of ``fields`` against ``s``, one polyline per (beta, lambda, u2) series.

    ``reference`` names an extras key drawn as one dashed curve per beta.
    """
    rows = sorted(rows, key=SweepRow.sort_key)
    series: dict = {}
    for f in fields:
        for r in rows:
            series.setdefault((f, (r.beta_label, r.lam, r.u2)), []).append((r.s, _value(r, f)))
    refs: dict = {}
    if reference:
        for r in rows:
            if reference in r.extras:
                refs.setdefault(r.beta_label, {})[r.s] = r.extras[reference]

    xs = [x for pts in series.values() for x, _ in pts] or [0.0]
    ys = [y for pts in series.values() for _, y in pts]
    ys += [y for d in refs.values() for y in d.values()]
    ys = ys or [0.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys)
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-12:
        y1 = y0 + 1.0

    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def px(x):
        return _LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return _TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:.0f}" height="{_H:.0f}" '
        f'viewBox="0 0 {_W:.0f} {_H:.0f}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_W:.0f}" height="{_H:.0f}" fill="#ffffff"/>',
        f'<rect x="{_LEFT:.2f}" y="{_TOP:.2f}" width="{pw:.2f}" height="{ph:.2f}" '
        'fill="none" stroke="#000000" stroke-width="1"/>',
    ]
    if title:
        out.append(f'<text x="{_LEFT:.2f}" y="18" font-size="13">{escape(title)}</text>')
    for k in range(6):
        xv = x0 + (x1 - x0) * k / 5
        yv = y0 + (y1 - y0) * k / 5
        out.append(
            f'<line x1="{px(xv):.2f}" y1="{_TOP + ph:.2f}" x2="{px(xv):.2f}" y2="{_TOP + ph + 4:.2f}" stroke="#000000"/>'
        )
        out.append(f'<text x="{px(xv):.2f}" y="{_TOP + ph + 16:.2f}" text-anchor="middle">{xv:.2f}</text>')
        out.append(
            f'<line x1="{_LEFT - 4:.2f}" y1="{py(yv):.2f}" x2="{_LEFT:.2f}" y2="{py(yv):.2f}" stroke="#000000"/>'
        )
        out.append(f'<text x="{_LEFT - 7:.2f}" y="{py(yv) + 4:.2f}" text-anchor="end">{yv:.3f}</text>')
    out.append(
        f'<text x="{_LEFT + pw / 2:.2f}" y="{_H - 15:.2f}" text-anchor="middle">thermalization strength s</text>'
    )
    ylabel = ", ".join(fields) + " [bits]"
    out.append(
        f'<text x="18" y="{_TOP + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_TOP + ph / 2:.2f})">{escape(ylabel)}</text>'
    )

    legend_y = _TOP + 10.0
    multi = len(fields) > 1
    for i, ((f, key), pts) in enumerate(sorted(series.items(), key=lambda kv: (kv[0][0], kv[0][1]))):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline class="series" points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        for x, y in pts:
            out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{color}"/>')
        lx = _W - _RIGHT + 10
        out.append(f'<line x1="{lx:.2f}" y1="{legend_y:.2f}" x2="{lx + 18:.2f}" y2="{legend_y:.2f}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 22:.2f}" y="{legend_y + 4:.2f}">{escape(_series_label(key, f, multi))}</text>')
        legend_y += 16
    for beta, curve in sorted(refs.items()):
        pts = sorted(curve.items())
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline class="reference" points="{coords}" fill="none" stroke="#000000" '
            'stroke-width="1" stroke-dasharray="5,3"/>'
        )
        lx = _W - _RIGHT + 10
        out.append(
            f'<line x1="{lx:.2f}" y1="{legend_y:.2f}" x2="{lx + 18:.2f}" y2="{legend_y:.2f}" '
            'stroke="#000000" stroke-dasharray="5,3"/>'
        )
        out.append(f'<text x="{lx + 22:.2f}" y="{legend_y + 4:.2f}">{escape(f"{reference}, beta={beta}")}</text>')
        legend_y += 16
    out.append("</svg>")
    return atomic_write(path, "\n".join(out) + "\n")
