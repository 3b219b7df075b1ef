"""ASCII visualisation for development-time verification.

This module is dev-only and not imported by the experiment runners.
"""

from __future__ import annotations

import numpy as np


def show_spectrum(
    eigenvalues,
    window: "EnergyWindow",  # noqa: F821
    config: "QpeConfig | None" = None,  # noqa: F821
    width: int = 64,
) -> str:
    """Print an ASCII strip of [0, 1) with eigenvalues, the window and the inner window.

    Legend: '.' = outside, '-' = energy window, '=' = inner window,
    digits = eigenvalue count in the cell ('+' for ten or more).
    Returns the string and also prints to stdout.
    """
    row = ["."] * width
    for i in range(width):
        x = (i + 0.5) / width
        if config is not None and config.inner_lower <= x <= config.inner_upper:
            row[i] = "="
        elif window.lower <= x <= window.upper:
            row[i] = "-"

    lam = np.mod(np.asarray(eigenvalues, dtype=float), 1.0)
    cells = np.minimum((lam * width).astype(int), width - 1)
    counts = np.bincount(cells, minlength=width)
    for i, n in enumerate(counts):
        if n:
            row[i] = str(n) if n < 10 else "+"

    ticks = [" "] * width
    for frac in (0.0, 0.25, 0.5, 0.75):
        label = f"{frac:g}"
        start = int(frac * width)
        ticks[start : start + len(label)] = label

    lines = ["".join(ticks), "".join(row)]
    if config is not None:
        lines.append(f"L={config.L}  inner=[{config.m_lo}/L, {config.m_hi}/L]  omega={config.omega:.4f}")
    lines.append(f"window e0={window.e0:g} delta={window.delta:g}  eigenvalues={lam.size}")

    result = "\n".join(lines)
    print(result)
    return result


def show_weights(
    eigenvalues,
    weights,
    width: int = 40,
) -> str:
    """Print one bar per eigenvalue, its length proportional to the weight q in [0, 1].

    Returns the string and also prints to stdout.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    q = np.asarray(weights, dtype=float)
    lines: list[str] = []
    for value, weight in zip(lam, q):
        filled = int(round(min(max(weight, 0.0), 1.0) * width))
        bar = "#" * filled + "." * (width - filled)
        lines.append(f"{value:>10.6f}  {bar}  {weight:.6f}")

    result = "\n".join(lines)
    print(result)
    return result
