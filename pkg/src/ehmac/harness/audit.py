"""Formula audit for the energy-harvesting inter-attempt time.

Puts the mass of the stated PMF, the two analytic moment sources and the
simulated moments side by side and names the source closer to simulation.
Every attempt spends exactly one energy unit and, when ``delta < q2``, all
harvested energy is eventually spent, so the long-run attempt rate is
``delta`` and ``E[T] = 1/delta``. The report lists that value too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..aoi import DEFAULT_TRUNCATION, MomentSource, aoi_both, moments_t, pmf_t_total_mass
from ..exceptions import ModeError
from ..params import SystemParams
from ..simulation import Estimate, SimConfig, run
from .csvio import fmt


@dataclass(frozen=True)
class AuditReport:
    params: SystemParams
    pmf_mass: float
    mean_t_paper: float
    mean_t_pmf: float
    second_moment_t_paper: float
    second_moment_t_pmf: float
    mean_t_energy_balance: float
    aoi_paper: float
    aoi_pmf: float
    sim_mean_t: Estimate
    sim_second_moment_t: Estimate
    sim_aoi: Estimate
    winner: str

    @property
    def mean_t_rel_gap(self) -> float:
        return (self.mean_t_paper - self.mean_t_pmf) / self.mean_t_pmf

    @property
    def second_moment_t_rel_gap(self) -> float:
        return (self.second_moment_t_paper - self.second_moment_t_pmf) / self.second_moment_t_pmf

    def distance_in_se(self, source: MomentSource | str) -> float:
        """``|simulated E[T] - analytic E[T]|`` in simulation standard errors."""
        value = (self.mean_t_pmf if MomentSource(source) is MomentSource.PMF_DERIVED
                 else self.mean_t_paper)
        se = self.sim_mean_t.std_error
        return abs(self.sim_mean_t.value - value) / se if se > 0 else math.inf

    def items(self) -> list[tuple[str, str]]:
        s = self.sim_mean_t
        return [
            ("pmf_mass", fmt(self.pmf_mass)),
            ("pmf_mass_deficit", fmt(1.0 - self.pmf_mass)),
            ("mean_t_paper", fmt(self.mean_t_paper)),
            ("mean_t_pmf", fmt(self.mean_t_pmf)),
            ("mean_t_rel_gap", fmt(self.mean_t_rel_gap)),
            ("second_moment_t_paper", fmt(self.second_moment_t_paper)),
            ("second_moment_t_pmf", fmt(self.second_moment_t_pmf)),
            ("second_moment_t_rel_gap", fmt(self.second_moment_t_rel_gap)),
            ("mean_t_energy_balance", fmt(self.mean_t_energy_balance)),
            ("sim_mean_t", fmt(s.value)),
            ("sim_mean_t_ci95", f"{fmt(s.value - s.ci_half_width)}..{fmt(s.value + s.ci_half_width)}"),
            ("sim_second_moment_t", fmt(self.sim_second_moment_t.value)),
            ("sim_second_moment_t_ci_half_width", fmt(self.sim_second_moment_t.ci_half_width)),
            ("aoi_paper", fmt(self.aoi_paper)),
            ("aoi_pmf", fmt(self.aoi_pmf)),
            ("sim_aoi", fmt(self.sim_aoi.value)),
            ("sim_aoi_ci_half_width", fmt(self.sim_aoi.ci_half_width)),
            ("distance_pmf_se", fmt(self.distance_in_se(MomentSource.PMF_DERIVED))),
            ("distance_paper_se", fmt(self.distance_in_se(MomentSource.PAPER_VERBATIM))),
            ("winner", self.winner),
        ]

    def render(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.items())


def audit(params: SystemParams, sim: SimConfig | None = None) -> AuditReport:
    """Build the audit report for an energy-harvesting parameter point.

    ``sim`` defaults to 10^6 slots x 20 replications; its ``params`` are replaced.
    """
    if not params.is_eh:
        raise ModeError("the audit only applies when S2 harvests energy")
    sim = replace(sim, params=params) if sim else SimConfig(params, horizon=1_000_000,
                                                            replications=20)
    mean_pmf, second_pmf = moments_t(params, MomentSource.PMF_DERIVED)
    mean_paper, second_paper = moments_t(params, MomentSource.PAPER_VERBATIM)
    aoi = aoi_both(params)
    result = run(sim)
    gap_pmf = abs(result.mean_t.value - mean_pmf)
    gap_paper = abs(result.mean_t.value - mean_paper)
    winner = (MomentSource.PMF_DERIVED if gap_pmf <= gap_paper else MomentSource.PAPER_VERBATIM)
    return AuditReport(
        params=params, pmf_mass=pmf_t_total_mass(params, DEFAULT_TRUNCATION),
        mean_t_paper=mean_paper, mean_t_pmf=mean_pmf,
        second_moment_t_paper=second_paper, second_moment_t_pmf=second_pmf,
        mean_t_energy_balance=1.0 / params.delta,
        aoi_paper=aoi[MomentSource.PAPER_VERBATIM].aoi, aoi_pmf=aoi[MomentSource.PMF_DERIVED].aoi,
        sim_mean_t=result.mean_t, sim_second_moment_t=result.second_moment_t,
        sim_aoi=result.mean_aoi, winner=winner.value)
