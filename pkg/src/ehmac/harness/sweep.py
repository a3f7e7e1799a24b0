"""Parameter sweeps, figure presets and analytic/simulation comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from joblib import Parallel, delayed

from ..aoi import MomentSource
from ..evaluate import (METRICS, analytic_point, metric_status, relative_difference,
                        simulated_point, worst)
from ..params import S2Power, SystemParams
from ..simulation import Estimate, SimConfig
from .config import parse_config

ENGINES = ("analytic_pmf", "analytic_paper", "simulation")
SWEPT = {"lambda": "lam", "q1": "q1", "q2": "q2", "delta": "delta", "theta": "theta_db"}
# keys usable in curve-family overrides
FAMILY_KEYS = {**SWEPT, "snr1": "snr1_db", "snr2": "snr2_db"}

# SystemParams field -> config key
_PARAM_KEYS = {"snr1_db": "snr1-db", "snr2_db": "snr2-db", "theta1_db": "theta1-db",
               "theta2_db": "theta2-db", "lam": "lambda", "q1": "q1", "q2": "q2",
               "delta": "delta", "s2_power": "s2"}


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter over ``start:stop:step`` on top of a fixed template.

    ``families`` optionally lists curve overrides, each a tuple of
    ``(key, value)`` pairs applied to ``fixed``; every family is swept in full.
    """

    swept_parameter: str
    start: float
    stop: float
    step: float
    fixed: SystemParams = field(default_factory=SystemParams)
    outputs: tuple = ("delay", "aoi")
    engines: tuple = ("analytic_pmf", "analytic_paper")
    families: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.swept_parameter not in SWEPT:
            raise ValueError(f"swept parameter must be one of {sorted(SWEPT)}, "
                             f"got {self.swept_parameter!r}")
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step!r}")
        if not self.start <= self.stop:
            raise ValueError(f"start ({self.start}) must be <= stop ({self.stop})")
        bad = set(self.outputs) - set(METRICS)
        if bad or not self.outputs:
            raise ValueError(f"outputs must be a non-empty subset of {METRICS}, got {self.outputs}")
        bad = set(self.engines) - set(ENGINES)
        if bad or not self.engines:
            raise ValueError(f"engines must be a non-empty subset of {ENGINES}, got {self.engines}")
        for fam in self.families:
            for key, _ in fam:
                if key not in FAMILY_KEYS:
                    raise ValueError(f"unknown family key {key!r}")
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "engines", tuple(self.engines))
        object.__setattr__(self, "families",
                           tuple(tuple((k, float(v)) for k, v in fam) for fam in self.families))

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 12) for i in range(n)]

    def curves(self) -> list[tuple[str, dict]]:
        """``(label, overrides)`` per curve; a single unlabeled curve without families."""
        if not self.families:
            return [("", {})]
        return [(";".join(f"{k}={v:g}" for k, v in fam),
                 {FAMILY_KEYS[k]: v for k, v in fam}) for fam in self.families]

    def points(self):
        """Yield ``(label, value, params_or_None)`` in output order.

        A value that violates the parameter invariants yields ``None`` so the
        row is still emitted, with status ``invalid``.
        """
        field_name = SWEPT[self.swept_parameter]
        for label, overrides in self.curves():
            for v in self.values():
                try:
                    params = self.fixed.with_(**overrides).with_(**{field_name: v})
                except ValueError:
                    params = None
                yield label, v, params

    def to_config(self) -> str:
        lines = [("name", self.name), ("param", self.swept_parameter),
                 ("start", repr(self.start)), ("stop", repr(self.stop)),
                 ("step", repr(self.step)), ("outputs", ",".join(self.outputs)),
                 ("engines", ",".join(self.engines))]
        for fname, key in _PARAM_KEYS.items():
            value = getattr(self.fixed, fname)
            lines.append((key, value.value if isinstance(value, S2Power) else repr(value)))
        for fam in self.families:
            lines.append(("family", ";".join(f"{k}:{v!r}" for k, v in fam)))
        return "".join(f"{k}={v}\n" for k, v in lines)

    @classmethod
    def from_config(cls, text: str) -> "SweepSpec":
        kw: dict = {}
        fixed: dict = {}
        families = []
        inverse = {v: k for k, v in _PARAM_KEYS.items()}
        for key, value in parse_config(text):
            if key == "name":
                kw["name"] = value
            elif key == "param":
                kw["swept_parameter"] = value
            elif key in ("start", "stop", "step"):
                kw[key] = float(value)
            elif key in ("outputs", "engines"):
                kw[key] = tuple(v for v in value.split(",") if v)
            elif key == "family":
                families.append(tuple((k, float(v)) for k, v in
                                      (item.split(":", 1) for item in value.split(";"))))
            elif key in inverse:
                fixed[inverse[key]] = value if key == "s2" else float(value)
            else:
                raise ValueError(f"unknown sweep key {key!r}")
        return cls(fixed=SystemParams(**fixed), families=tuple(families), **kw)


# -- figure presets ----------------------------------------------------------------------

_Q1_FAMILY = tuple((("q1", q),) for q in (0.6, 0.8, 1.0))
_Q1_THETA_FAMILY = tuple((("q1", q), ("theta", t)) for t in (0.0, 5.0) for q in (0.6, 0.8, 1.0))

PRESETS = {
    "fig3": SweepSpec("lambda", 0.0, 0.4, 0.01,
                      SystemParams(q2=0.5, delta=0.3, theta1_db=0.0, theta2_db=0.0),
                      outputs=("delay",), families=_Q1_FAMILY, name="fig3"),
    "fig4": SweepSpec("q2", 0.35, 0.95, 0.05, SystemParams(lam=0.6, delta=0.3),
                      outputs=("aoi",), families=_Q1_THETA_FAMILY, name="fig4"),
    "fig5": SweepSpec("q2", 0.05, 1.0, 0.05, SystemParams(lam=0.6, s2_power="grid"),
                      outputs=("aoi",), families=_Q1_THETA_FAMILY, name="fig5"),
    "fig6": SweepSpec("delta", 0.05, 0.75, 0.05, SystemParams(lam=0.3, q1=0.8, q2=0.8),
                      outputs=("aoi",), families=((("theta", 0.0),), (("theta", 5.0),)),
                      name="fig6"),
    "fig7": SweepSpec("lambda", 0.0, 1.0, 0.05,
                      SystemParams(delta=0.3, q2=0.8, theta1_db=5.0, theta2_db=5.0),
                      outputs=("aoi",), families=_Q1_FAMILY, name="fig7"),
    "fig8": SweepSpec("lambda", 0.0, 1.0, 0.05,
                      SystemParams(q2=0.8, theta1_db=5.0, theta2_db=5.0, s2_power="grid"),
                      outputs=("aoi",), families=_Q1_FAMILY, name="fig8"),
    "delay-delta": SweepSpec("delta", 0.05, 0.75, 0.05, SystemParams(lam=0.3, q2=0.8),
                             outputs=("delay",), families=_Q1_FAMILY, name="delay-delta"),
}


def figure_preset(name: str) -> SweepSpec:
    """Sweep reproducing one of the published figures.

    Curve families the captions leave open default to ``q1`` in
    {0.6, 0.8, 1.0} and ``theta`` in {0, 5} dB; these are preset choices.
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown figure preset {name!r}; choose from {sorted(PRESETS)}") from None


# -- evaluation --------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricComparison:
    analytic_pmf: float
    analytic_paper: float
    simulated: Estimate | None
    rel_diff: float
    status: str


@dataclass(frozen=True)
class ComparisonRow:
    curve: str
    param: str
    value: float
    metrics: dict  # metric -> MetricComparison
    status: str


def _evaluate_point(params, engines, sim: SimConfig | None):
    if params is None:
        return None, None, None
    pmf = analytic_point(params, MomentSource.PMF_DERIVED) if "analytic_pmf" in engines else None
    paper = (analytic_point(params, MomentSource.PAPER_VERBATIM)
             if "analytic_paper" in engines else None)
    simulated = None
    if "simulation" in engines:
        simulated = simulated_point(replace(sim, params=params))
    return pmf, paper, simulated


def _row(spec: SweepSpec, label, value, params, evaluated) -> ComparisonRow:
    pmf, paper, simulated = evaluated
    nan = math.nan
    metrics = {}
    for metric in spec.outputs:
        if params is None:
            metrics[metric] = MetricComparison(nan, nan, None, nan, "invalid")
            continue
        a = pmf.values[metric] if pmf else nan
        b = paper.values[metric] if paper else nan
        s = simulated.values[metric] if simulated else None
        reference = a if pmf else b
        rel = relative_difference(s.value, reference) if s is not None else nan
        metrics[metric] = MetricComparison(a, b, s, rel, metric_status(metric, pmf, paper, simulated))
    return ComparisonRow(curve=label, param=spec.swept_parameter, value=value, metrics=metrics,
                         status=worst(m.status for m in metrics.values()))


def evaluate(spec: SweepSpec, sim: SimConfig | None = None, n_jobs: int = 1
             ) -> list[ComparisonRow]:
    """One :class:`ComparisonRow` per (curve, swept value), in sweep order."""
    if "simulation" in spec.engines and sim is None:
        raise ValueError("the simulation engine needs a SimConfig")
    points = list(spec.points())
    evaluated = Parallel(n_jobs=n_jobs)(
        delayed(_evaluate_point)(params, spec.engines, sim) for _, _, params in points)
    return [_row(spec, label, value, params, ev)
            for (label, value, params), ev in zip(points, evaluated)]


def compare(spec: SweepSpec, sim: SimConfig, n_jobs: int = 1) -> list[ComparisonRow]:
    """Run the simulation alongside every analytic engine of ``spec``."""
    analytic = tuple(e for e in spec.engines if e != "simulation") or ("analytic_pmf",
                                                                      "analytic_paper")
    return evaluate(replace(spec, engines=analytic + ("simulation",)), sim, n_jobs)


def csv_rows(rows: list[ComparisonRow], engines) -> list[tuple]:
    """Flatten comparison rows into the long CSV format."""
    out = []
    for row in rows:
        param = f"{row.param}[{row.curve}]" if row.curve else row.param
        for metric, m in row.metrics.items():
            if "analytic_pmf" in engines:
                out.append((param, row.value, "analytic_pmf", metric, m.analytic_pmf, None,
                            m.status))
            if "analytic_paper" in engines:
                out.append((param, row.value, "analytic_paper", metric, m.analytic_paper, None,
                            m.status))
            if "simulation" in engines:
                s = m.simulated
                out.append((param, row.value, "simulation", metric,
                            s.value if s else math.nan, s.ci_half_width if s else math.nan,
                            m.status))
                out.append((param, row.value, "rel_diff", metric, m.rel_diff, None, m.status))
    return out
