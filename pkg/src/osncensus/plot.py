"""Dependency-free SVG rendering of a degree distribution on log-log axes."""
import math
from xml.sax.saxutils import escape

WIDTH = 640
HEIGHT = 480
MARGIN = (60, 20, 30, 50)  # left, right, top, bottom


def _fmt(v):
    return f"{v:.6f}"


def _decade_range(values):
    lo, hi = math.floor(min(values)), math.ceil(max(values))
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    return lo, hi


def render_loglog_svg(points, fit=None, title="Degree distribution", width=WIDTH, height=HEIGHT):
    """SVG document: scatter of ``(degree, count)`` points on log10 axes plus,
    when ``fit`` (anything with ``alpha`` and ``log_c``) is given, the
    regression line ``log10 count = log_c - alpha * log10 degree``.

    Output is a pure function of the inputs. Points with a non-positive
    coordinate cannot be drawn and are skipped.
    """
    pts = [(math.log10(k), math.log10(c)) for k, c in points if k > 0 and c > 0]
    if not pts:
        raise ValueError("no plottable points (need degree > 0 and count > 0)")
    left, right, top, bottom = MARGIN
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = _decade_range([p[0] for p in pts])
    y0, y1 = _decade_range([p[1] for p in pts])

    def px(lx):
        return left + (lx - x0) / (x1 - x0) * pw

    def py(ly):
        return top + (y1 - ly) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" '
        f'data-x-range="{x0} {x1}" data-y-range="{y0} {y1}" '
        f'data-plot="{left} {top} {pw} {ph}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath>',
        f'<g class="axes" stroke="black" fill="none">'
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/></g>',
    ]
    ticks = ['<g class="ticks" font-family="sans-serif" font-size="11">']
    for d in range(x0, x1 + 1):
        ticks.append(f'<text x="{_fmt(px(d))}" y="{top + ph + 16}" '
                     f'text-anchor="middle">1e{d}</text>')
    for d in range(y0, y1 + 1):
        ticks.append(f'<text x="{left - 6}" y="{_fmt(py(d) + 4)}" '
                     f'text-anchor="end">1e{d}</text>')
    ticks.append("</g>")
    out.extend(ticks)
    out.append(f'<text x="{left + pw / 2}" y="{height - 8}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">friends (degree)</text>')
    out.append(f'<text x="14" y="{top + ph / 2}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 14 {top + ph / 2})">members</text>')
    out.append('<g class="points" fill="#1f4fbf">')
    for lx, ly in pts:
        out.append(f'<circle class="point" cx="{_fmt(px(lx))}" cy="{_fmt(py(ly))}" r="3"/>')
    out.append("</g>")
    if fit is not None:
        out.append(
            f'<line class="fit" clip-path="url(#plot)" stroke="#c0392b" stroke-width="1.5" '
            f'x1="{_fmt(px(x0))}" y1="{_fmt(py(fit.log_c - fit.alpha * x0))}" '
            f'x2="{_fmt(px(x1))}" y2="{_fmt(py(fit.log_c - fit.alpha * x1))}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
