"""Locale-free number formatting for reports."""

import math


def fixed(x: float, decimals: int) -> str:
    if not math.isfinite(x):
        return str(x)
    s = f"{x:.{decimals}f}"
    # avoid "-0.00"
    if s.lstrip("-").strip("0.") == "":
        s = s.lstrip("-")
    return s


def grouped(x: float) -> str:
    """Integer with comma thousands separators, e.g. ``-6,621,526``."""
    if not math.isfinite(x):
        return str(x)
    return f"{round(x):,d}"


def millions(x: float, decimals: int = 3) -> str:
    return fixed(x / 1e6, decimals)


def mil_label(x: float) -> str:
    """Published-table style volume, e.g. ``318.1 Mil``."""
    return f"{millions(x, 1)} Mil"
