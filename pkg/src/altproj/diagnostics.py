"""Geometric diagnostics computed from iteration traces.

Angles come in two families measured on consecutive triples
(z_k, x_k, z_{k+1}): the separability angle at the M-point x_k and the
super-regularity angle at the next Q-point z_{k+1}.  Rates are measured
on the gap sequence |z_k - x_k|, the quantity the local contraction
argument actually bounds; the trailing-half window discards
pre-asymptotic iterations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alternating import IterationTrace
from .errors import InsufficientData

_GOOD_FIT_REL = 0.05


@dataclass
class AngleReport:
    separability: list = field(default_factory=list)
    super_regularity: list = field(default_factory=list)
    skipped: int = 0

    @property
    def min_separability(self):
        return min(self.separability) if self.separability else float("nan")

    @property
    def min_super_regularity(self):
        return min(self.super_regularity) if self.super_regularity else float("nan")

    def to_json(self):
        return {
            "separability": self.separability,
            "super_regularity": self.super_regularity,
            "min_separability": self.min_separability,
            "min_super_regularity": self.min_super_regularity,
            "skipped": self.skipped,
        }


@dataclass
class RateReport:
    ratios: list
    rate: float                 # geometric-mean contraction over the trailing half
    rate_regression: float      # exp(slope) of the log-gap regression
    r_squared: float
    quality: str                # "good" when both estimates agree within 5%
    contracting: bool
    predicted: float | None = None

    def to_json(self):
        return {
            "ratios": self.ratios,
            "rate": self.rate,
            "rate_regression": self.rate_regression,
            "r_squared": self.r_squared,
            "quality": self.quality,
            "contracting": self.contracting,
            "predicted": self.predicted,
        }


def _angle(u, v):
    c = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def angles_from_trace(trace: IterationTrace) -> AngleReport:
    """Separability and super-regularity angles along a two-set trace."""
    if len(trace.zs) < 2 or any(x is None for x in trace.xs[:-1]):
        raise InsufficientData("need at least 2 iterations with projected points")
    if trace.xs[0] is not None and trace.xs[0].shape != trace.zs[0].shape:
        raise InsufficientData("trace points live in different spaces; no angles")
    max_gap = max(trace.gaps) if trace.gaps else 0.0
    floor = 100 * np.finfo(float).eps * max_gap
    report = AngleReport()
    for k in range(len(trace.zs) - 1):
        z, x, z1 = trace.zs[k], trace.xs[k], trace.zs[k + 1]
        segs = (z - x, z1 - x, z - z1)
        if any(np.linalg.norm(s) <= floor for s in segs):
            report.skipped += 1
            continue
        report.separability.append(_angle(z - x, z1 - x))
        report.super_regularity.append(_angle(z - z1, x - z1))
    if not report.separability:
        raise InsufficientData("all triples were degenerate")
    return report


def fit_rate(trace: IterationTrace) -> RateReport:
    """Contraction rate of the gap sequence.

    Geometric mean of gap ratios over the trailing half of the usable
    iterations, cross-checked against a log-linear regression.
    """
    gaps = np.asarray(trace.gaps, dtype=float)
    floor = 100 * np.finfo(float).eps
    usable = gaps > floor
    # keep the leading contiguous run of usable gaps
    n = 0
    while n < len(gaps) and usable[n]:
        n += 1
    g = gaps[:n]
    if n < 6:
        raise InsufficientData(f"only {n} gaps above the noise floor, need 6")
    ratios = (g[1:] / g[:-1]).tolist()
    half = len(ratios) // 2
    tail = np.asarray(ratios[half:])
    rate = float(np.exp(np.mean(np.log(tail))))
    ks = np.arange(half, n, dtype=float)
    slope, _ = np.polyfit(ks, np.log(g[half:]), 1)
    rate_reg = float(np.exp(slope))
    pred = np.polyval(np.polyfit(ks, np.log(g[half:]), 1), ks)
    resid = np.log(g[half:]) - pred
    total = np.log(g[half:]) - np.mean(np.log(g[half:]))
    denom = float(total @ total)
    r2 = 1.0 - float(resid @ resid) / denom if denom > 0 else 1.0
    quality = "good" if abs(rate_reg - rate) <= _GOOD_FIT_REL * rate else "poor"
    return RateReport(
        ratios=ratios,
        rate=rate,
        rate_regression=rate_reg,
        r_squared=r2,
        quality=quality,
        contracting=rate < 1.0 - 1e-9,
    )


def compare_predicted(report: RateReport, alpha_hat):
    """Measured full-cycle rate against the cos(alpha) upper envelope.

    No pass/fail: the bound is asymptotic and one-sided.  Flags the
    degenerate orthogonal case and rates clearly above the bound.
    """
    alpha_hat = float(alpha_hat)
    if not (0.0 < alpha_hat <= np.pi / 2):
        raise ValueError("alpha_hat must lie in (0, pi/2]")
    predicted = float(np.cos(alpha_hat))
    flags = []
    if predicted < 1e-12:
        flags.append("OrthogonalBoundZero")
        ratio = float("inf") if report.rate > 0 else float("nan")
    else:
        ratio = report.rate / predicted
    if report.rate > predicted + 0.1:
        flags.append("BoundViolation")
    return {
        "measured": report.rate,
        "predicted": predicted,
        "ratio": ratio,
        "flags": flags,
    }
