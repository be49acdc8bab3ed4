import json
from fractions import Fraction

import pytest

from bipartite_access.params import ModelParams, ParamsError, parse_real

BASE = {"lambda": 0.5, "mu_U": 1, "mu_V": 1, "c": 1, "B": 1, "beta": "1/2", "B_prime": 1,
        "beta_prime": 2, "gamma_U": 1, "gamma_V": 1, "r": 100}


def test_parse_real():
    assert parse_real("1/2") == Fraction(1, 2)
    assert parse_real(3) == Fraction(3)
    assert parse_real(0.25) == 0.25
    with pytest.raises(ParamsError):
        parse_real("abc")


def test_roundtrip_and_derived():
    p = ModelParams.from_dict(BASE)
    assert p.beta == Fraction(1, 2)
    assert p.rho_U == 0.5 and p.drift == 0.5
    assert ModelParams.from_json(json.dumps(p.to_dict())) == p


@pytest.mark.parametrize(
    "change, message",
    [
        ({"beta_prime": "3/2"}, "requires beta_prime > beta + 1"),
        ({"gamma_V": 2}, "requires gamma_U >= gamma_V"),
        ({"lambda": 1}, "requires rho_U = lambda/mu_U < c"),
        ({"mu_V": "1/4", "mu_U": 4}, "requires rho_V = lambda/mu_V < c"),
        ({"r": 0}, "requires r > 0"),
        ({"B": -1}, "requires B > 0"),
    ],
)
def test_each_invariant_has_its_message(change, message):
    with pytest.raises(ParamsError) as exc:
        ModelParams.from_dict(BASE | change)
    assert str(exc.value) == message


def test_unknown_and_missing_keys():
    with pytest.raises(ParamsError, match="unknown"):
        ModelParams.from_dict(BASE | {"zeta": 1})
    doc = dict(BASE)
    del doc["r"]
    with pytest.raises(ParamsError, match="missing"):
        ModelParams.from_dict(doc)
    with pytest.raises(ParamsError, match="malformed"):
        ModelParams.from_json("{")


def test_with_revalidates():
    p = ModelParams.from_dict(BASE)
    assert p.with_(r=10).r == 10
    with pytest.raises(ParamsError):
        p.with_(beta=3)
