"""Command-line front end: ``glfit fit|profile|grubbs|table2``.

Tables are written as tsv, csv or json.  Delimited output has one header
row; summaries and notes follow the table as ``#`` comment lines, which
the sample loader also skips.  JSON output is an object with ``config``,
``rows`` and ``summary`` keys.  All numbers go through the same rounding,
so the three formats carry identical values.

Exit codes: 0 success, 1 input or usage error, 2 a fit did not converge.
"""

import argparse
import csv
import io
import json
import math
import sys
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .distribution import GLParams, pdf
from .exceptions import GLFitError
from .fit import (
    DEFAULT_CENTRAL_ORDERS,
    DEFAULT_MOMENT_ORDERS,
    METHODS,
    Q_TAGS,
    fit_central_moments,
    fit_min_disagreement,
    fit_mle,
    fit_moments,
    fit_population_stats,
    mle_profile,
    normalize_q,
)
from .outliers import DEFAULT_ALPHA, grubbs_filter
from .series import FREQ_MODES, build_freq, format_sample, load_bundled, load_sample_file, sturges_bins, weighted_stats

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2
TABLE2_P = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 6.0)
TABLE2_MLE_P = (1.0, 2.0, 3.0, 4.0)
RESIDUE_NOTE = (
    "min_disagreement objectives depend on how the frequency series is built "
    "(freq_mode={mode}); compare their trends, not their absolute values"
)
STALL_NOTE = (
    "rows with converged=no did not meet the convergence test; for p < 1 the density has a cusp at mu, "
    "so when mu sits on an observation the simplex shrinks without meeting the function tolerance"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share the input-error exit code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# --- argument parsing -------------------------------------------------------------


def parse_grid(text):
    """Parse ``lo:hi:step`` into an inclusive grid of shapes."""
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"p-grid must look like lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError(f"p-grid needs lo <= hi and step > 0, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def parse_orders(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"orders must be comma-separated integers, got {text!r}") from None


def _common(parser, grubbs_default=False):
    parser.add_argument("--input", metavar="PATH", help="sample file (default: bundled PCB log Kow data)")
    if grubbs_default:
        parser.add_argument("--grubbs", action=argparse.BooleanOptionalAction, default=True,
                            help="screen the sample with the Grubbs test first (default: on)")
    else:
        parser.add_argument("--grubbs", action="store_true", help="screen the sample with the Grubbs test first")
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="Grubbs significance level")
    parser.add_argument("--max-removals", type=int, default=10, help="cap on Grubbs removals")
    parser.add_argument("--format", choices=("tsv", "csv", "json"), default="tsv")
    parser.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    parser.add_argument("--precision", type=int, default=6, help="significant digits (default 6)")


def _freq_args(parser):
    parser.add_argument("--freq-mode", choices=FREQ_MODES, default="distinct",
                        help="frequency series construction for frequency-based methods")
    parser.add_argument("--bins", type=int, help="histogram cells (default: Sturges)")


def _plot_args(parser):
    parser.add_argument("--plot", choices=("csv", "svg"), help="also write chart data or an SVG chart")
    parser.add_argument("--plot-out", metavar="PATH", help="chart destination (default: glfit-<command>.<ext>)")


def build_parser():
    parser = _Parser(prog="glfit", description="Fit Gauss-Laplace distributions to a sample.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_fit = sub.add_parser("fit", help="fit one method at one shape")
    _common(p_fit)
    _freq_args(p_fit)
    _plot_args(p_fit)
    p_fit.add_argument("--method", choices=METHODS, default="mle")
    p_fit.add_argument("--p", type=float, default=2.0, help="shape parameter")
    p_fit.add_argument("--q", default="0", help=f"denominator exponent, one of {', '.join(Q_TAGS)}")
    p_fit.add_argument("--orders", help="moment orders, e.g. 0,1,2")
    p_fit.add_argument("--fit-p", action="store_true", help="let moment methods estimate p as well")

    p_prof = sub.add_parser("profile", help="maximum likelihood over a grid of shapes")
    _common(p_prof)
    _plot_args(p_prof)
    p_prof.add_argument("--p-grid", default="1:4:0.25", help="lo:hi:step (default 1:4:0.25)")

    p_grubbs = sub.add_parser("grubbs", help="sequential Grubbs outlier screening")
    _common(p_grubbs)
    p_grubbs.add_argument("--emit-clean", metavar="PATH", help="write the cleaned sample here")

    p_table = sub.add_parser("table2", help="sweep every method, q and shape into one table")
    _common(p_table, grubbs_default=True)
    _freq_args(p_table)
    return parser


# --- number formatting and output -------------------------------------------------


def _round(value, digits):
    if isinstance(value, (bool, np.bool_)) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def _text(value):
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    return str(value)


class Report:
    def __init__(self, columns, config):
        self.columns = list(columns)
        self.config = config
        self.rows = []
        self.summary = {}
        self.notes = []

    def add(self, **row):
        self.rows.append(row)

    def render(self, fmt, digits):
        rows = [{k: _round(r.get(k), digits) for k in self.columns} for r in self.rows]
        summary = {k: ([_round(x, digits) for x in v] if isinstance(v, (list, tuple)) else _round(v, digits))
                   for k, v in self.summary.items()}
        if fmt == "json":
            payload = {"config": self.config, "rows": rows, "summary": dict(summary, notes=self.notes)}
            return json.dumps(payload, indent=2) + "\n"
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
        writer.writerow(self.columns)
        for r in rows:
            writer.writerow([_text(r[k]) for k in self.columns])
        for key, value in summary.items():
            if isinstance(value, list):
                value = " ".join(_text(v) for v in value)
            buf.write(f"# {key}: {_text(value)}\n")
        for note in self.notes:
            buf.write(f"# note: {note}\n")
        return buf.getvalue()


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- charts ---------------------------------------------------------------------


def _ticks(lo, hi, count=5):
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def svg_chart(series, title, xlabel, ylabel, width=640, height=420):
    """Self-contained SVG line/point/bar chart.

    ``series`` is a list of ``(label, xs, ys, style)`` with style one of
    ``"line"``, ``"points"`` or ``"bars"``.
    """
    left, right, top, bottom = 70, 20, 40, 50
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if any(s[3] == "bars" for s in series):
        y0 = min(y0, 0.0)
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    x1 = x1 if x1 > x0 else x0 + 1.0

    def sx(v):
        return left + (v - x0) / (x1 - x0) * (width - left - right)

    def sy(v):
        return height - bottom - (v - y0) / (y1 - y0) * (height - top - bottom)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" y2="{height - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{height - bottom}" x2="{sx(t):.2f}" y2="{height - bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{height - bottom + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{(left + width - right) / 2}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{(top + height - bottom) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(top + height - bottom) / 2})">{escape(ylabel)}</text>')
    for i, (label, sxs, sys_, style) in enumerate(series):
        color = colors[i % len(colors)]
        pts = list(zip(np.asarray(sxs, float), np.asarray(sys_, float)))
        if style == "line":
            path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        elif style == "points":
            out.extend(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="{color}"/>' for a, b in pts)
        else:
            half = 0.5 * (pts[1][0] - pts[0][0]) if len(pts) > 1 else 0.5
            for a, b in pts:
                w = sx(a + half) - sx(a - half)
                out.append(f'<rect x="{sx(a - half):.2f}" y="{sy(b):.2f}" width="{w:.2f}" '
                           f'height="{sy(max(y0, 0.0)) - sy(b):.2f}" fill="{color}" fill-opacity="0.35"/>')
        ly = top + 8 + 16 * i
        out.append(f'<rect x="{width - right - 150}" y="{ly - 9}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{width - right - 135}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def chart_csv(series, digits):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["series", "x", "y"])
    for label, xs, ys, _ in series:
        for a, b in zip(xs, ys):
            writer.writerow([label, _text(_round(a, digits)), _text(_round(b, digits))])
    return buf.getvalue()


def _write_chart(args, series, title, xlabel, ylabel):
    path = args.plot_out or f"glfit-{args.command}.{args.plot}"
    if args.plot == "svg":
        text = svg_chart(series, title, xlabel, ylabel)
    else:
        text = chart_csv(series, args.precision)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# --- subcommands ------------------------------------------------------------------


def _load(args):
    sample = load_bundled() if args.input is None else load_sample_file(args.input)
    reports = []
    if getattr(args, "grubbs", False):
        sample, reports = grubbs_filter(sample, args.alpha, args.max_removals)
    return sample, reports


def _config(args, **extra):
    keys = ("input", "grubbs", "alpha", "method", "p", "q", "freq_mode", "bins", "p_grid", "orders", "fit_p")
    cfg = {k: getattr(args, k) for k in keys if hasattr(args, k)}
    cfg["input"] = cfg.get("input") or "<bundled>"
    cfg["command"] = args.command
    cfg.update(extra)
    return cfg


def _screen_summary(report, sample, screening):
    report.summary["n"] = sample.n
    if screening:
        report.summary["removed"] = [r.suspect_value for r in screening if r.rejected]


def run_fit(args, sample, screening):
    q = normalize_q(args.q)
    method = args.method
    if method in ("min_disagreement", "moments", "central_moments"):
        fs = build_freq(sample, args.freq_mode, args.bins)
        init = GLParams(*weighted_stats(fs), args.p)
        if method == "min_disagreement":
            res = fit_min_disagreement(fs, args.p, q)
        elif method == "moments":
            orders = parse_orders(args.orders) if args.orders else DEFAULT_MOMENT_ORDERS
            res = fit_moments(fs, init, orders, fit_p=args.fit_p)
        else:
            orders = parse_orders(args.orders) if args.orders else DEFAULT_CENTRAL_ORDERS
            res = fit_central_moments(fs, init, orders, fit_p=args.fit_p)
    elif method == "population_stats":
        res = fit_population_stats(sample, fit_p=args.fit_p)
    else:
        res = fit_mle(sample, args.p)

    report = Report(("method", "p", "q", "mu", "sigma", "objective", "converged"), _config(args))
    report.add(method=method, p=res.params.p, q=res.q, mu=res.params.mu, sigma=res.params.sigma,
               objective=res.objective, converged=res.converged)
    _screen_summary(report, sample, screening)
    _emit(report.render(args.format, args.precision), args.out)

    if args.plot:
        x = sample.values
        bins = sturges_bins(sample.n)
        counts, edges = np.histogram(x, bins)
        centers = 0.5 * (edges[1:] + edges[:-1])
        density = counts / (sample.n * (edges[1] - edges[0]))
        grid = np.linspace(edges[0], edges[-1], 200)
        series = [("observed", centers, density, "bars"), ("fitted", grid, pdf(grid, res.params), "line")]
        _write_chart(args, series, f"{method}, p = {res.params.p:g}", "x", "density")
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def run_profile(args, sample, screening):
    grid = parse_grid(args.p_grid)
    curve = mle_profile(sample, grid)
    report = Report(("p", "mu", "sigma", "mle"), _config(args))
    for pt in curve.points:
        report.add(p=pt.p, mu=pt.mu, sigma=pt.sigma, mle=pt.mle)
    report.summary.update(
        quartic_c4_to_c0=list(curve.quartic),
        r_squared=curve.r_squared,
        p_max=curve.p_max,
        mle_max=curve.mle_max,
        poly_p_max=curve.poly_p_max,
        poly_mle_max=curve.poly_mle_max,
    )
    if curve.failed:
        report.summary["failed_p"] = list(curve.failed)
    _screen_summary(report, sample, screening)
    _emit(report.render(args.format, args.precision), args.out)

    if args.plot:
        ps = np.array([pt.p for pt in curve.points])
        fine = np.geomspace(ps[0], ps[-1], 200)
        series = [("MLE", ps, [pt.mle for pt in curve.points], "points"),
                  ("quartic in log2 p", fine, curve.predict(fine), "line")]
        _write_chart(args, series, f"profile maximum p = {curve.p_max:.3f}", "p", "log2 likelihood")
    return EXIT_OK if not curve.failed else EXIT_NONCONVERGED


def run_grubbs(args, sample, _screening):
    clean, reports = grubbs_filter(sample, args.alpha, args.max_removals)
    report = Report(("round", "n", "suspect", "g_statistic", "critical", "rejected"), _config(args))
    for i, r in enumerate(reports, 1):
        report.add(round=i, n=r.n, suspect=r.suspect_value, g_statistic=r.g_statistic,
                   critical=r.critical, rejected=r.rejected)
    report.summary.update(removed=sum(r.rejected for r in reports), final_n=clean.n)
    _emit(report.render(args.format, args.precision), args.out)
    if args.emit_clean:
        with open(args.emit_clean, "w", encoding="utf-8") as fh:
            fh.write(format_sample(clean))
    return EXIT_OK


def run_table2(args, sample, screening):
    fs = build_freq(sample, args.freq_mode, args.bins)
    report = Report(("method", "q", "p", "mu", "sigma", "objective", "converged"), _config(args))
    ok = True
    for q in Q_TAGS:
        for p in TABLE2_P:
            res = fit_min_disagreement(fs, p, q)
            ok &= res.converged
            report.add(method="min_disagreement", q=q, p=p, mu=res.params.mu, sigma=res.params.sigma,
                       objective=res.objective, converged=res.converged)
    for p in TABLE2_MLE_P:
        res = fit_mle(sample, p)
        ok &= res.converged
        report.add(method="mle", q=None, p=p, mu=res.params.mu, sigma=res.params.sigma,
                   objective=res.objective, converged=res.converged)
    _screen_summary(report, sample, screening)
    report.notes.append(RESIDUE_NOTE.format(mode=args.freq_mode))
    if not ok:
        report.notes.append(STALL_NOTE)
    _emit(report.render(args.format, args.precision), args.out)
    return EXIT_OK if ok else EXIT_NONCONVERGED


COMMANDS = {"fit": run_fit, "profile": run_profile, "grubbs": run_grubbs, "table2": run_table2}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.precision < 1:
            raise UsageError("precision must be at least 1")
        sample, screening = _load(args)
        return COMMANDS[args.command](args, sample, screening)
    except OSError as exc:
        target = exc.filename or args.input
        print(f"glfit: error: cannot read {target}: {exc.strerror or exc}", file=sys.stderr)
    except (GLFitError, ValueError, UsageError) as exc:
        print(f"glfit: error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
