"""Two-segment (hinge) regression for runtime-vs-temperature scatter.

Model: runtime = base                       for temp <= knee
       runtime = base + slope * (temp-knee) for temp >  knee

For each candidate knee on a fine grid the other two parameters have a
closed-form least-squares solution; the knee minimizing the residual sum
of squares wins. Deterministic, no iterative optimizer.
"""

from dataclasses import dataclass

import numpy as np

KNEE_GRID_STEP_C = 0.1


@dataclass(frozen=True)
class HingeFit:
    knee_c: float
    slope_s_per_c: float
    base_runtime_s: float
    sse: float
    points: int


def _solve_for_knee(temps, runtimes, knee):
    """Closed-form LS for (base, slope) given the knee; returns sse too."""
    x = np.maximum(0.0, temps - knee)
    n = len(temps)
    sx = x.sum()
    sxx = (x * x).sum()
    sy = runtimes.sum()
    sxy = (x * runtimes).sum()
    det = n * sxx - sx * sx
    if det <= 1e-12:
        base = sy / n
        slope = 0.0
    else:
        slope = (n * sxy - sx * sy) / det
        base = (sy - slope * sx) / n
    residual = runtimes - (base + slope * x)
    return base, slope, float(residual @ residual)


def fit_two_segment(temps, runtimes) -> HingeFit:
    """Best hinge fit over a 0.1 °C knee grid spanning the data.

    Needs at least four points and some temperature spread; raises
    ValueError otherwise.
    """
    temps = np.asarray(temps, dtype=float)
    runtimes = np.asarray(runtimes, dtype=float)
    if temps.shape != runtimes.shape or temps.ndim != 1:
        raise ValueError("temps and runtimes must be equal-length 1-D sequences")
    if len(temps) < 4:
        raise ValueError(f"need at least 4 points for a hinge fit, got {len(temps)}")
    lo, hi = float(temps.min()), float(temps.max())
    if hi - lo < 1.0:
        raise ValueError(f"temperature spread {hi - lo:.3f} °C is too small to fit")

    best = None
    for knee in np.arange(lo, hi, KNEE_GRID_STEP_C):
        base, slope, sse = _solve_for_knee(temps, runtimes, knee)
        if slope < 0:
            continue
        if best is None or sse < best[3]:
            best = (knee, slope, base, sse)
    if best is None:
        # negatively-sloped data: fall back to a flat fit at the mean
        base = float(runtimes.mean())
        residual = runtimes - base
        best = (hi, 0.0, base, float(residual @ residual))
    knee, slope, base, sse = best
    return HingeFit(
        knee_c=float(knee),
        slope_s_per_c=float(slope),
        base_runtime_s=float(base),
        sse=sse,
        points=len(temps),
    )
