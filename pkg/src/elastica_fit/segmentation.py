"""Recursive split-and-fit driver producing piecewise elastica.

A piece that fits its sub-curve with R4 at or below the threshold becomes a
leaf; otherwise it is split at its arclength midpoint and both halves are
processed, up to max_depth.  Joins are made continuous by fitting every piece
with endpoint constraints (and end-tangent constraints when requested); the
join tangent direction comes from the target curve at the breakpoint, so the
pieces decouple.
"""

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .curve import DEFAULT_SAMPLES, sample
from .elastica import ElasticaCurve
from .errors import DomainError
from .fitting import FitProblem, FitResult, fit, objective, residual_r4
from .recovery import RecoveryReport, initial_guess


@dataclass(frozen=True)
class JoinContinuity:
    """Measured gaps at one interior breakpoint."""

    position_gap: float
    tangent_gap: float


@dataclass(frozen=True)
class PiecewiseFit:
    """Result of fit_piecewise.

    breakpoints is the increasing list of global parameter values bounding
    the pieces (starting at 0, ending at 1); segments[i] covers
    [breakpoints[i], breakpoints[i+1]].  reversed_flags marks pieces whose
    parameters describe the piece traversed backwards.  threshold_met is
    False when some leaf hit max_depth with R4 above the threshold.
    """

    breakpoints: List[float]
    segments: List[FitResult]
    guesses: List[RecoveryReport]
    r4: List[float]
    reversed_flags: List[bool]
    join_continuity: List[JoinContinuity]
    threshold_met: bool

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def max_r4(self) -> float:
        return max(self.r4)


def _fit_piece(piece, n_samples, constraints, max_iter):
    """Recover a guess and optimize one sub-curve; handles the degenerate
    and reversed-input paths."""
    smp = sample(piece, n_samples)
    rep = initial_guess(smp)
    target = smp.reversed() if rep.reversed_input else smp
    if rep.degenerate is not None:
        res = FitResult(params=rep.params,
                        objective=objective(rep.params, target),
                        grad_norm=0.0, iterations=0, converged=True,
                        message=f"degenerate {rep.degenerate}")
        return rep, res, target
    problem = FitProblem(target=target, init=rep.params,
                         constraints=constraints, max_iter=max_iter)
    return rep, fit(problem), target


def _arclength_midpoint(piece, t0, t1, n_samples):
    """Global parameter at which the piece's arclength is halved."""
    smp = sample(piece, n_samples)
    t_loc = float(np.interp(0.5 * smp.length, smp.s, smp.t))
    t_loc = min(max(t_loc, 1e-6), 1.0 - 1e-6)
    return t0 + t_loc * (t1 - t0)


def _segment_endpoint(res, reversed_flag, end):
    """Point and unit tangent of a fitted piece at its start (end=0) or
    finish (end=1), in the orientation of the original curve."""
    cur = ElasticaCurve(res.params)
    t = 1.0 - end if reversed_flag else end
    pt = cur.point(t)
    d = cur.derivative(t)
    if reversed_flag:
        d = -d
    return pt, math.atan2(d[1], d[0])


def fit_piecewise(curve, r4_threshold: float, max_depth: int,
                  constraints: str = "endpoints",
                  n_samples: int = DEFAULT_SAMPLES,
                  max_iter: int = 200) -> PiecewiseFit:
    """Approximate a curve by a chain of elastica segments, splitting at
    arclength midpoints until R4 meets the threshold or depth runs out."""
    if r4_threshold <= 0:
        raise DomainError("r4_threshold must be positive")
    if max_depth < 0:
        raise DomainError("max_depth must be nonnegative")

    breakpoints = [0.0, 1.0]
    leaves = {}

    def process(t0, t1, depth):
        piece = curve.trimmed(t0, t1) if (t0, t1) != (0.0, 1.0) else curve
        rep, res, target = _fit_piece(piece, n_samples, constraints, max_iter)
        r4 = residual_r4(res.params, target)
        if r4 <= r4_threshold or depth >= max_depth:
            leaves[t0] = (t1, rep, res, r4)
            return
        tm = _arclength_midpoint(piece, t0, t1, n_samples)
        breakpoints.append(tm)
        process(t0, tm, depth + 1)
        process(tm, t1, depth + 1)

    process(0.0, 1.0, 0)
    breakpoints.sort()

    segments, guesses, r4s, rev = [], [], [], []
    for t0 in breakpoints[:-1]:
        _, rep, res, r4 = leaves[t0]
        segments.append(res)
        guesses.append(rep)
        r4s.append(r4)
        rev.append(rep.reversed_input)

    joins = []
    for i in range(len(segments) - 1):
        p_left, a_left = _segment_endpoint(segments[i], rev[i], 1)
        p_right, a_right = _segment_endpoint(segments[i + 1], rev[i + 1], 0)
        gap = float(np.linalg.norm(p_left - p_right))
        dth = (a_left - a_right + math.pi) % (2 * math.pi) - math.pi
        joins.append(JoinContinuity(position_gap=gap, tangent_gap=abs(dth)))

    return PiecewiseFit(
        breakpoints=breakpoints, segments=segments, guesses=guesses,
        r4=r4s, reversed_flags=rev, join_continuity=joins,
        threshold_met=all(r <= r4_threshold for r in r4s))
