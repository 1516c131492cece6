from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


@dataclass
class BoundReport:
    """Ratios of a computed quantity to a bound envelope over a grid.

    Declarative: callers decide which spread or trend is acceptable.
    ``trend_slope`` is the least-squares slope of the log extremal ratio
    against the log of the grid variable named in ``trend_axis``.
    """

    name: str
    ratio_min: float
    ratio_max: float
    trend_slope: float
    grid: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)  # (t, x, ratio)
    trend_axis: str = "t"
    notes: dict = field(default_factory=dict)
    degenerate: bool = False

    @property
    def spread(self) -> float:
        if self.degenerate or self.ratio_min <= 0:
            return float("inf")
        return self.ratio_max / self.ratio_min

    def table(self) -> str:
        buf = io.StringIO()
        buf.write(f"{self.name}\n")
        if self.degenerate:
            buf.write(f"  degenerate: {self.notes.get('reason', '')}\n")
            return buf.getvalue()
        buf.write(f"  ratio_min   = {self.ratio_min:.6g}\n")
        buf.write(f"  ratio_max   = {self.ratio_max:.6g}\n")
        buf.write(f"  spread      = {self.spread:.6g}\n")
        buf.write(f"  trend_slope = {self.trend_slope:+.4f} (vs log {self.trend_axis})\n")
        for k, v in self.notes.items():
            buf.write(f"  {k} = {v}\n")
        return buf.getvalue()

    def csv(self) -> str:
        lines = ["t,x,ratio"]
        lines += [f"{t:.17g},{x:.17g},{r:.17g}" for t, x, r in self.rows]
        return "\n".join(lines) + "\n"


def log_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    if len(lx) < 2:
        return 0.0
    return float(np.polyfit(lx, ly, 1)[0])
