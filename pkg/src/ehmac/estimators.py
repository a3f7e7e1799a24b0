"""scikit-learn style front end.

Both estimators take the system parameters as constructor hyperparameters,
so ``get_params``/``set_params``/``clone`` work as usual and a sweep is just
``predict`` over an array of values of ``sweep_param``::

    >>> est = MacAnalyzer(s2_power="grid", q2=0.5, q1=0.8).fit()
    >>> est.queue_.stable
    True
    >>> est.set_params(metric="delay").predict([0.1, 0.2])  # doctest: +SKIP
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .aoi import MomentSource, aoi_both
from .evaluate import METRICS, analytic_point, simulated_point
from .exceptions import DomainError
from .model import queue_analysis, success_probs
from .params import SystemParams
from .simulation import DEFAULT_SEED, ChannelMode, SimConfig, run

SWEEPABLE = {"lambda": "lam", "lam": "lam", "q1": "q1", "q2": "q2", "delta": "delta",
             "theta": "theta_db"}


def check_sweep_values(X) -> np.ndarray:
    """Coerce ``X`` to a 1-D float array; a single-column 2-D array is accepted."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D array of sweep values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sweep values must be finite")
    return arr


class _SystemMixin:
    """Shared hyperparameter plumbing for the estimators."""

    def system_params(self) -> SystemParams:
        return SystemParams(snr1_db=self.snr1_db, snr2_db=self.snr2_db,
                            theta1_db=self.theta1_db, theta2_db=self.theta2_db,
                            lam=self.lam, q1=self.q1, q2=self.q2, delta=self.delta,
                            s2_power=self.s2_power)

    def _check_sweep(self):
        if self.sweep_param not in SWEEPABLE:
            raise ValueError(f"sweep_param must be one of {sorted(SWEEPABLE)}, "
                             f"got {self.sweep_param!r}")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")

    def _points(self, X):
        self._check_sweep()
        base = self.system_params()
        field = SWEEPABLE[self.sweep_param]
        for v in check_sweep_values(X):
            try:
                yield base.with_(**{field: float(v)})
            except ValueError:
                yield None


class MacAnalyzer(_SystemMixin, BaseEstimator):
    """Closed-form delay and AoI of the two-node channel.

    ``fit`` takes no data; it validates the hyperparameters and stores
    ``success_probs_``, ``queue_`` and ``aoi_`` (one entry per moment source,
    empty if the AoI does not exist at this point).
    """

    def __init__(self, snr1_db=11.0, snr2_db=13.0, theta1_db=0.0, theta2_db=0.0, lam=0.3,
                 q1=0.6, q2=0.8, delta=0.3, s2_power="eh", moment_source="pmf",
                 sweep_param="lambda", metric="aoi"):
        self.snr1_db = snr1_db
        self.snr2_db = snr2_db
        self.theta1_db = theta1_db
        self.theta2_db = theta2_db
        self.lam = lam
        self.q1 = q1
        self.q2 = q2
        self.delta = delta
        self.s2_power = s2_power
        self.moment_source = moment_source
        self.sweep_param = sweep_param
        self.metric = metric

    def fit(self, X=None, y=None):
        params = self.system_params()
        self._check_sweep()
        MomentSource(self.moment_source)
        self.params_ = params
        self.success_probs_ = success_probs(params)
        self.queue_ = queue_analysis(params, self.success_probs_)
        try:
            self.aoi_ = aoi_both(params, self.success_probs_, self.queue_)
        except DomainError:
            self.aoi_ = {}
        return self

    def predict(self, X):
        """Analytic ``metric`` at each value of ``sweep_param`` in ``X`` (NaN where invalid)."""
        out = []
        for params in self._points(X):
            if params is None:
                out.append(np.nan)
                continue
            out.append(analytic_point(params, self.moment_source).values[self.metric])
        return np.asarray(out, dtype=float)


class SlotSimulator(_SystemMixin, BaseEstimator):
    """Monte-Carlo counterpart of :class:`MacAnalyzer`.

    ``fit`` runs the configured replications and stores ``result_``.
    ``predict`` re-runs the simulation at every sweep value with the same seed.
    """

    def __init__(self, snr1_db=11.0, snr2_db=13.0, theta1_db=0.0, theta2_db=0.0, lam=0.3,
                 q1=0.6, q2=0.8, delta=0.3, s2_power="eh", horizon=1_000_000, burn_in=None,
                 replications=20, seed=DEFAULT_SEED, channel_mode="bernoulli",
                 sweep_param="lambda", metric="aoi"):
        self.snr1_db = snr1_db
        self.snr2_db = snr2_db
        self.theta1_db = theta1_db
        self.theta2_db = theta2_db
        self.lam = lam
        self.q1 = q1
        self.q2 = q2
        self.delta = delta
        self.s2_power = s2_power
        self.horizon = horizon
        self.burn_in = burn_in
        self.replications = replications
        self.seed = seed
        self.channel_mode = channel_mode
        self.sweep_param = sweep_param
        self.metric = metric

    def sim_config(self, params: SystemParams | None = None) -> SimConfig:
        return SimConfig(params or self.system_params(), horizon=self.horizon,
                         burn_in=self.burn_in, replications=self.replications,
                         base_seed=self.seed, channel_mode=ChannelMode(self.channel_mode))

    def fit(self, X=None, y=None):
        self._check_sweep()
        self.config_ = self.sim_config()
        self.result_ = run(self.config_)
        return self

    def predict(self, X, return_ci: bool = False):
        """Simulated ``metric`` per sweep value; optionally also the 95% half-widths."""
        values, halves = [], []
        for params in self._points(X):
            if params is None:
                values.append(np.nan)
                halves.append(np.nan)
                continue
            est = simulated_point(self.sim_config(params)).values[self.metric]
            values.append(est.value)
            halves.append(est.ci_half_width)
        values = np.asarray(values, dtype=float)
        return (values, np.asarray(halves, dtype=float)) if return_ci else values

    def score(self, X=None, y=None):
        """Negative absolute relative gap between simulated and analytic ``metric``."""
        check_is_fitted(self, "result_")
        analytic = analytic_point(self.config_.params).values[self.metric]
        simulated = {"delay": self.result_.mean_delay, "aoi": self.result_.mean_aoi,
                     "throughput": self.result_.throughput, "mu": self.result_.service_rate,
                     "pbar2": self.result_.success_rate_s2}[self.metric].value
        return -abs(simulated - analytic) / abs(analytic)
