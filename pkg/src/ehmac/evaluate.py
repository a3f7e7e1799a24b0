"""Evaluate output metrics at a single parameter point, analytically or by simulation.

Failures are folded into a status string instead of raised, so sweeps never
drop a point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .aoi import MomentSource, aoi_average, pbar2
from .exceptions import DomainError, StabilityError
from .model import queue_analysis, success_probs
from .params import SystemParams
from .simulation import Estimate, SimConfig, SimResult, run

METRICS = ("delay", "aoi", "throughput", "mu", "pbar2")

OK = "ok"
UNSTABLE = "unstable"
DIVERGED = "diverged"
INVALID = "invalid"
NO_DATA = "no-data"
AUDIT_MISMATCH = "audit-mismatch"

# most severe first
SEVERITY = (INVALID, UNSTABLE, DIVERGED, NO_DATA, AUDIT_MISMATCH, OK)


def worst(statuses) -> str:
    statuses = set(statuses)
    for s in SEVERITY:
        if s in statuses:
            return s
    return OK


@dataclass
class AnalyticPoint:
    values: dict
    stable: bool | None
    invalid: bool = False
    aoi_diverged: bool = False
    error: str | None = None


@dataclass
class SimulatedPoint:
    values: dict  # metric -> Estimate
    diverged: bool
    result: SimResult | None = field(default=None, repr=False)


def analytic_point(params: SystemParams, source: MomentSource | str = MomentSource.PMF_DERIVED
                   ) -> AnalyticPoint:
    nan = math.nan
    values = dict.fromkeys(METRICS, nan)
    try:
        probs = success_probs(params)
        queue = queue_analysis(params, probs)
    except StabilityError as exc:
        return AnalyticPoint(values, stable=None, invalid=True, error=str(exc))
    values.update(delay=queue.delay, throughput=queue.throughput, mu=queue.mu,
                  pbar2=pbar2(params, probs, queue))
    point = AnalyticPoint(values, stable=queue.stable)
    try:
        values["aoi"] = aoi_average(params, probs, queue, source).aoi
    except DomainError as exc:
        point.aoi_diverged = True
        point.error = str(exc)
    return point


def simulated_point(config: SimConfig) -> SimulatedPoint:
    result = run(config)
    values = {"delay": result.mean_delay, "aoi": result.mean_aoi,
              "throughput": result.throughput, "mu": result.service_rate,
              "pbar2": result.success_rate_s2}
    return SimulatedPoint(values, diverged=result.diverged, result=result)


def relative_difference(estimate: float, reference: float) -> float:
    if not (math.isfinite(estimate) and math.isfinite(reference)) or reference == 0:
        return math.nan
    return (estimate - reference) / reference


def metric_status(metric: str, pmf: AnalyticPoint | None, paper: AnalyticPoint | None,
                  sim: SimulatedPoint | None) -> str:
    statuses = []
    for point in (pmf, paper):
        if point is None:
            continue
        if point.invalid:
            statuses.append(INVALID)
        elif point.stable is False:
            statuses.append(UNSTABLE)
        if metric == "aoi" and point.aoi_diverged:
            statuses.append(DIVERGED)
    if sim is not None:
        if metric == "aoi" and sim.diverged:
            statuses.append(DIVERGED)
        elif math.isnan(float(sim.values[metric].value)):
            statuses.append(NO_DATA)
    if pmf is not None and paper is not None:
        a, b = pmf.values[metric], paper.values[metric]
        if math.isfinite(a) and math.isfinite(b) and not math.isclose(a, b, rel_tol=1e-9):
            statuses.append(AUDIT_MISMATCH)
    return worst(statuses)


__all__ = ["METRICS", "AnalyticPoint", "SimulatedPoint", "analytic_point", "simulated_point",
           "relative_difference", "metric_status", "worst", "Estimate"]
