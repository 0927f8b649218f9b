"""
gnuplot script for an expansion fit.

The script plots |norm - (2/3) eps^3 l| against eps on log-log axes with the
fitted remainder and annotates the observed slope. The data are inlined as a
datablock so the script is self-contained.
"""

from pathlib import Path
from typing import Any, Mapping, Optional, Union

from ..asymptotics.fitting import ExpansionFit
from ..errors import IoFailure
from ..utils import format_float
from .logging.artifact_writer import provenance_comment


def render_plot_script(fit: ExpansionFit, image: str = "fit.png") -> str:
    """Script text; identical fits give identical bytes."""
    if not fit.records:
        raise ValueError("cannot plot an empty fit")
    slope = "n/a" if fit.slope is None else f"{fit.slope:.2f}"
    lines = [
        f"# tubenorm expansion fit: {fit.name} ({fit.model} curve)",
        "set terminal pngcairo size 900,600",
        f'set output "{image}"',
        "set logscale xy",
        'set xlabel "eps"',
        'set ylabel "|norm - (2/3) eps^3 l|"',
        "set key top left",
        'set format y "%.1e"',
        "$records << EOD",
    ]
    leading = 2.0 / 3.0 * fit.length
    for eps, value in sorted(fit.records):
        remainder = abs(value - leading * eps**3)
        lines.append(f"{format_float(eps)} {format_float(remainder)} {format_float(abs(fit.remainder(eps)))}")
    lines.append("EOD")
    for power in fit.powers:
        if power != 3:
            lines.append(f"c{power} = {format_float(fit.coefficients[f'c{power}'])}")
    terms = " + ".join(f"c{p}*x**{p}" for p in fit.powers if p != 3)
    lines += [
        f"r(x) = abs({terms})",
        f'set label 1 "residual slope {slope}" at graph 0.05, graph 0.92',
        'plot $records using 1:2 with points pt 7 title "remainder", \\',
        '     r(x) with lines lw 2 title "fit"',
    ]
    return "\n".join(lines) + "\n"


def emit_plot_script(
    fit: ExpansionFit, path: Union[str, Path], envelope: Optional[Mapping[str, Any]] = None
) -> Path:
    """Write the script to ``path``; the image name is the path with a .png suffix.

    With an ``envelope`` the script opens with its provenance comment.
    """
    path = Path(path)
    text = render_plot_script(fit, path.with_suffix(".png").name)
    comment = provenance_comment(envelope or {})
    if comment:
        text = comment + "\n" + text
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise IoFailure(f"could not write {path}: {exc}") from exc
    return path
