"""System parameterization of the two-node channel."""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields, replace

from .validation import check_db, check_probability


class S2Power(str, enum.Enum):
    """How the status-update sensor S2 is powered."""

    ENERGY_HARVESTING = "eh"
    GRID = "grid"

    @classmethod
    def parse(cls, value: "S2Power | str") -> "S2Power":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"eh": cls.ENERGY_HARVESTING, "energyharvesting": cls.ENERGY_HARVESTING,
                   "energy_harvesting": cls.ENERGY_HARVESTING, "grid": cls.GRID}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"s2_power must be one of 'eh', 'grid', got {value!r}") from None


def db_to_linear(x_db: float) -> float:
    """Convert decibels to a linear power ratio; ``-inf`` maps to 0."""
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Full parameterization of the channel.

    SNRs are received mean SNRs ``P_i * beta_i / sigma^2`` in dB. Thresholds
    may be ``-inf`` dB (linear zero, every transmission decodes). ``lam`` is
    the per-slot data arrival probability at S1 (``lambda`` is reserved in
    Python).
    """

    snr1_db: float = 11.0
    snr2_db: float = 13.0
    theta1_db: float = 0.0
    theta2_db: float = 0.0
    lam: float = 0.3
    q1: float = 0.6
    q2: float = 0.8
    delta: float = 0.3
    s2_power: S2Power = S2Power.ENERGY_HARVESTING

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "snr1_db", check_db(self.snr1_db, "snr1_db"))
        set_(self, "snr2_db", check_db(self.snr2_db, "snr2_db"))
        set_(self, "theta1_db", check_db(self.theta1_db, "theta1_db", allow_neg_inf=True))
        set_(self, "theta2_db", check_db(self.theta2_db, "theta2_db", allow_neg_inf=True))
        set_(self, "lam", check_probability(self.lam, "lam"))
        set_(self, "q1", check_probability(self.q1, "q1", positive=True))
        set_(self, "q2", check_probability(self.q2, "q2", positive=True))
        set_(self, "delta", check_probability(self.delta, "delta"))
        set_(self, "s2_power", S2Power.parse(self.s2_power))

    @property
    def is_eh(self) -> bool:
        return self.s2_power is S2Power.ENERGY_HARVESTING

    @property
    def snr1(self) -> float:
        return db_to_linear(self.snr1_db)

    @property
    def snr2(self) -> float:
        return db_to_linear(self.snr2_db)

    @property
    def theta1(self) -> float:
        return db_to_linear(self.theta1_db)

    @property
    def theta2(self) -> float:
        return db_to_linear(self.theta2_db)

    def with_(self, **changes) -> "SystemParams":
        """Copy with fields replaced; ``theta_db`` sets both thresholds."""
        if "theta_db" in changes:
            theta = changes.pop("theta_db")
            changes.setdefault("theta1_db", theta)
            changes.setdefault("theta2_db", theta)
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
