"""Model parameters for the queue-based random-access dynamics."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from typing import Any, Union

Real = Union[float, Fraction]


class ParamsError(ValueError):
    """A parameter set violates one of the model invariants."""


def parse_real(value: Any) -> Real:
    """Accept numbers or strings such as ``"0.25"`` and ``"1/2"``.

    Rational strings are kept exact so that regime boundaries do not depend
    on the floating-point representation of ``1/(d*-1)``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParamsError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return Fraction(text)
            return float(text)
        except (ValueError, ZeroDivisionError):
            raise ParamsError(f"not a number: {value!r}") from None
    raise ParamsError(f"not a number: {value!r}")


def _to_json_value(x: Real):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


@dataclass(frozen=True)
class ModelParams:
    """All scalar inputs of the model.

    ``g_U(x) = B x**beta`` on side U and ``g_V(x) = B_prime x**beta_prime`` on
    side V; initial queues are ``gamma_U * r`` and ``gamma_V * r``.
    """

    lam: Real
    mu_U: Real
    mu_V: Real
    c: Real
    B: Real
    beta: Real
    B_prime: Real
    beta_prime: Real
    gamma_U: Real
    gamma_V: Real
    r: Real

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float, Fraction)) or isinstance(v, bool):
                raise ParamsError(f"{f.name} must be a real number")
            if not math.isfinite(float(v)) or v <= 0:
                raise ParamsError(f"requires {f.name} > 0")
        if not self.rho_U < float(self.c):
            raise ParamsError("requires rho_U = lambda/mu_U < c")
        if not self.rho_V < float(self.c):
            raise ParamsError("requires rho_V = lambda/mu_V < c")
        if not self.gamma_U >= self.gamma_V:
            raise ParamsError("requires gamma_U >= gamma_V")
        if not self.beta_prime > self.beta + 1:
            raise ParamsError("requires beta_prime > beta + 1")

    @property
    def rho_U(self) -> float:
        return float(self.lam) / float(self.mu_U)

    @property
    def rho_V(self) -> float:
        return float(self.lam) / float(self.mu_V)

    @property
    def drift(self) -> float:
        """Net drain speed ``c - rho_U`` of an active U-queue."""
        return float(self.c) - self.rho_U

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **{k: parse_real(v) for k, v in changes.items()})

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelParams":
        doc = dict(doc)
        if "lambda" in doc:
            doc["lam"] = doc.pop("lambda")
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ParamsError(f"unknown parameter {sorted(unknown)[0]!r}")
        missing = names - set(doc)
        if missing:
            raise ParamsError(f"missing parameter {sorted(missing)[0]!r}")
        return cls(**{k: parse_real(v) for k, v in doc.items()})

    def to_dict(self) -> dict:
        out = {k: _to_json_value(v) for k, v in asdict(self).items()}
        out["lambda"] = out.pop("lam")
        return out

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParamsError(f"malformed parameter JSON: {exc}") from None


def load_params(path) -> ModelParams:
    with open(path, encoding="utf-8") as fh:
        return ModelParams.from_json(fh.read())
