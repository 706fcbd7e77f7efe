"""Probability laws for the two-valued contextual measurement model.

Every C-type variable (the original ``c``, the value ``cbar`` that replaces it
on the a_1 branch, and ``chat`` that replaces it on the a_2 branch) is
described only through its conditional law given ``a``. The joint law of the
three C-type variables given ``a`` is left open; samplers draw them
conditionally independently, which does not affect any reported statistic.

Outcomes are encoded as 0/1 codes throughout the package: code 0 stands for
the first value of a law (a_1 or c_1), code 1 for the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from .errors import DegenerateA, RangeError

TOL = 1e-12

Probability = float


def _check_probability(p: Any, name: str) -> float:
    try:
        value = float(p)
    except (TypeError, ValueError):
        raise RangeError(f"{name}: {p!r} is not a number", field=name) from None
    if math.isnan(value) or value < -TOL or value > 1.0 + TOL:
        raise RangeError(f"{name} = {value!r} is outside [0, 1]", field=name)
    return value


@dataclass(frozen=True)
class TwoPointLaw:
    """Law of a variable taking ``value_1`` with probability ``p_1``."""

    value_1: float = 1.0
    value_2: float = 2.0
    p_1: Probability = 0.5

    @property
    def p_2(self) -> float:
        return 1.0 - self.p_1

    def value(self, code: int) -> float:
        return self.value_1 if code == 0 else self.value_2


@dataclass(frozen=True)
class ConditionalLaw:
    """P(C-type variable = c_1 | a = stated value); the complement is implied."""

    p_c1_given: Probability = 0.5

    @property
    def p_c2_given(self) -> float:
        return 1.0 - self.p_c1_given

    def p(self, j: int) -> float:
        """Probability of c_j, j in {1, 2}."""
        return self.p_c1_given if j == 1 else 1.0 - self.p_c1_given


@dataclass(frozen=True)
class ModelSpec:
    """Joint laws of (a, c), (a, cbar), (a, chat) sharing the a-marginal.

    ``cbar_given_a2`` and ``chat_given_a1`` never reach any statistic; when
    omitted they mirror ``cbar_given_a1`` and ``chat_given_a2``.
    """

    a_law: TwoPointLaw
    c_given_a1: ConditionalLaw
    c_given_a2: ConditionalLaw
    cbar_given_a1: ConditionalLaw
    chat_given_a2: ConditionalLaw
    cbar_given_a2: ConditionalLaw | None = None
    chat_given_a1: ConditionalLaw | None = None
    c_values: tuple[float, float] = field(default=(1.0, 2.0))

    def __post_init__(self) -> None:
        if self.cbar_given_a2 is None:
            object.__setattr__(self, "cbar_given_a2", self.cbar_given_a1)
        if self.chat_given_a1 is None:
            object.__setattr__(self, "chat_given_a1", self.chat_given_a2)

    @classmethod
    def from_probabilities(
        cls,
        p_a1: float,
        c_given_a1: float,
        c_given_a2: float,
        cbar_given_a1: float,
        chat_given_a2: float,
        *,
        cbar_given_a2: float | None = None,
        chat_given_a1: float | None = None,
        a_values: tuple[float, float] = (1.0, 2.0),
        c_values: tuple[float, float] = (1.0, 2.0),
    ) -> "ModelSpec":
        """Build a model from bare probabilities of a_1 and of c_1 per branch."""
        return cls(
            a_law=TwoPointLaw(a_values[0], a_values[1], p_a1),
            c_given_a1=ConditionalLaw(c_given_a1),
            c_given_a2=ConditionalLaw(c_given_a2),
            cbar_given_a1=ConditionalLaw(cbar_given_a1),
            chat_given_a2=ConditionalLaw(chat_given_a2),
            cbar_given_a2=None if cbar_given_a2 is None else ConditionalLaw(cbar_given_a2),
            chat_given_a1=None if chat_given_a1 is None else ConditionalLaw(chat_given_a1),
            c_values=tuple(c_values),
        )

    @classmethod
    def symmetric(cls) -> "ModelSpec":
        """Every probability equal to 1/2; the law produced by the XOR-tile generator."""
        return cls.from_probabilities(0.5, 0.5, 0.5, 0.5, 0.5)

    @property
    def p_a1(self) -> float:
        return self.a_law.p_1

    @property
    def p_a2(self) -> float:
        return self.a_law.p_2

    def conditionals(self) -> dict[str, ConditionalLaw]:
        return {
            "c_given_a1": self.c_given_a1,
            "c_given_a2": self.c_given_a2,
            "cbar_given_a1": self.cbar_given_a1,
            "cbar_given_a2": self.cbar_given_a2,
            "chat_given_a1": self.chat_given_a1,
            "chat_given_a2": self.chat_given_a2,
        }

    def with_values(self, **changes: float) -> "ModelSpec":
        """Copy with some probabilities replaced; keys as in :meth:`to_dict`."""
        return model_from_dict({**self.to_dict(), **changes})

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "a_law.value_1": self.a_law.value_1,
            "a_law.value_2": self.a_law.value_2,
            "a_law.p_1": self.a_law.p_1,
            "c_values": list(self.c_values),
        }
        for name, law in self.conditionals().items():
            out[name] = law.p_c1_given
        return out


_MODEL_KEYS = {
    "a_law.value_1",
    "a_law.value_2",
    "a_law.p_1",
    "c_values",
    "c_given_a1",
    "c_given_a2",
    "cbar_given_a1",
    "cbar_given_a2",
    "chat_given_a1",
    "chat_given_a2",
}


def model_from_dict(doc: Mapping[str, Any]) -> ModelSpec:
    """Inverse of :meth:`ModelSpec.to_dict`. Keys are flat paths.

    Raises RangeError for missing or unknown keys so that config problems
    surface through the same channel as range violations.
    """
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise RangeError(f"unknown model keys: {sorted(unknown)}", field=sorted(unknown)[0])
    required = ("a_law.p_1", "c_given_a1", "c_given_a2", "cbar_given_a1", "chat_given_a2")
    for key in required:
        if key not in doc:
            raise RangeError(f"missing model key {key!r}", field=key)

    def law(key: str) -> ConditionalLaw | None:
        return ConditionalLaw(doc[key]) if key in doc and doc[key] is not None else None

    c_values = doc.get("c_values", (1.0, 2.0))
    return ModelSpec(
        a_law=TwoPointLaw(doc.get("a_law.value_1", 1.0), doc.get("a_law.value_2", 2.0), doc["a_law.p_1"]),
        c_given_a1=ConditionalLaw(doc["c_given_a1"]),
        c_given_a2=ConditionalLaw(doc["c_given_a2"]),
        cbar_given_a1=ConditionalLaw(doc["cbar_given_a1"]),
        chat_given_a2=ConditionalLaw(doc["chat_given_a2"]),
        cbar_given_a2=law("cbar_given_a2"),
        chat_given_a1=law("chat_given_a1"),
        c_values=tuple(c_values),
    )


def validate(model: ModelSpec) -> ModelSpec:
    """Check every model invariant; return the model with probabilities as floats.

    Raises DegenerateA when a is degenerate and RangeError for any
    out-of-range probability or ill-formed label set. Never raises anything
    else for a ModelSpec-shaped input.
    """
    try:
        a_law = model.a_law
        laws = model.conditionals()
        c_values = tuple(model.c_values)
    except AttributeError as exc:
        raise RangeError(f"not a model: {exc}") from None

    p_a1 = _check_probability(getattr(a_law, "p_1", None), "a_law.p_1")
    if p_a1 <= TOL or p_a1 >= 1.0 - TOL:
        raise DegenerateA(f"a_law.p_1 = {p_a1!r}: a must not be degenerate", field="a_law.p_1")
    try:
        a_distinct = float(a_law.value_1) != float(a_law.value_2)
        c_distinct = len(c_values) == 2 and float(c_values[0]) != float(c_values[1])
    except (TypeError, ValueError):
        raise RangeError("value labels must be real numbers") from None
    if not a_distinct:
        raise RangeError("a_law.value_1 and a_law.value_2 must differ", field="a_law.value_1")
    if not c_distinct:
        raise RangeError("c_values must hold two distinct labels", field="c_values")

    clean = {}
    for name, law in laws.items():
        clean[name] = ConditionalLaw(_check_probability(getattr(law, "p_c1_given", None), name))

    validated = replace(
        model,
        a_law=TwoPointLaw(float(a_law.value_1), float(a_law.value_2), p_a1),
        c_values=(float(c_values[0]), float(c_values[1])),
        **clean,
    )
    p1, p2 = marginal_c(validated)
    if not (-TOL <= p1 <= 1 + TOL and -TOL <= p2 <= 1 + TOL and abs(p1 + p2 - 1.0) <= TOL):
        raise RangeError(f"implied c-marginal ({p1}, {p2}) is not a probability law")
    return validated


def marginal_c(model: ModelSpec) -> tuple[float, float]:
    """(p_1^c, p_2^c) by total probability over the a-partition."""
    p_a1 = model.a_law.p_1
    p_a2 = 1.0 - p_a1
    p1 = model.c_given_a1.p_c1_given * p_a1 + model.c_given_a2.p_c1_given * p_a2
    p2 = (1.0 - model.c_given_a1.p_c1_given) * p_a1 + (1.0 - model.c_given_a2.p_c1_given) * p_a2
    return p1, p2
