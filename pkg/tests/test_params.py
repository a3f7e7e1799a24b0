import math

import pytest

from ehmac import S2Power, SystemParams, db_to_linear
from ehmac.validation import check_db, check_int, check_probability


def test_defaults_and_linear_units():
    p = SystemParams()
    assert p.is_eh and p.lam == 0.3
    assert p.snr1 == pytest.approx(10 ** 1.1)
    assert p.theta1 == 1.0


def test_neg_inf_threshold_is_zero():
    p = SystemParams(theta1_db=-math.inf)
    assert p.theta1 == 0.0
    assert db_to_linear(-math.inf) == 0.0


@pytest.mark.parametrize("field,value", [
    ("lam", 1.2), ("lam", -0.1), ("q1", 0.0), ("q2", 0.0), ("delta", math.nan),
    ("snr1_db", math.inf), ("snr2_db", -math.inf), ("s2_power", "solar"),
])
def test_invalid_values_rejected(field, value):
    with pytest.raises(ValueError):
        SystemParams(**{field: value})


def test_type_errors():
    with pytest.raises(TypeError):
        SystemParams(lam="0.3")
    with pytest.raises(TypeError):
        check_probability(True, "x")


def test_s2_power_aliases():
    assert S2Power.parse("GRID") is S2Power.GRID
    assert S2Power.parse("energy_harvesting") is S2Power.ENERGY_HARVESTING
    assert SystemParams(s2_power="grid").s2_power is S2Power.GRID


def test_with_theta_sets_both():
    p = SystemParams().with_(theta_db=5.0)
    assert p.theta1_db == p.theta2_db == 5.0
    assert SystemParams().with_(theta_db=5.0, theta2_db=1.0).theta2_db == 1.0


def test_params_frozen_and_dict():
    p = SystemParams()
    with pytest.raises(AttributeError):
        p.lam = 0.5
    assert SystemParams(**p.as_dict()) == p


def test_validation_helpers():
    assert check_probability(1, "x") == 1.0
    with pytest.raises(ValueError):
        check_probability(0, "x", positive=True)
    assert check_db(-math.inf, "x", allow_neg_inf=True) == -math.inf
    with pytest.raises(ValueError):
        check_int(-1, "n")
    with pytest.raises(TypeError):
        check_int(1.5, "n")
