"""
Extended real numbers: the reals plus -inf and +inf.

Limits such as lim n^{1/2} mu_n or lim theta_n / mu_n live here. Arithmetic
follows the usual conventions; indeterminate forms raise instead of producing
NaN.
"""
import math
from typing import Any, Union

from pydantic import BaseModel, ConfigDict, model_serializer, model_validator

from .errors import DomainError, IndeterminateFormError

Number = Union[int, float, "ExtendedReal"]


def _parse_value(raw: Any) -> float:
    if isinstance(raw, str):
        text = raw.strip().lower()
        if text in ("+inf", "inf", "infinity", "+infinity", "pos_inf"):
            return math.inf
        if text in ("-inf", "-infinity", "neg_inf"):
            return -math.inf
        try:
            return float(text)
        except ValueError as e:
            raise DomainError(f"Not an extended real: {raw!r}") from e
    return float(raw)


class ExtendedReal(BaseModel):
    """A real number or one of the two infinities."""

    model_config = ConfigDict(frozen=True)

    value: float

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if isinstance(data, ExtendedReal):
            return {"value": data.value}
        if isinstance(data, dict):
            return {"value": _parse_value(data.get("value"))}
        return {"value": _parse_value(data)}

    @model_validator(mode="after")
    def _no_nan(self) -> "ExtendedReal":
        if math.isnan(self.value):
            raise ValueError("NaN is not an extended real")
        return self

    @model_serializer
    def _serialize(self) -> Union[float, str]:
        return self.to_json()

    def to_json(self) -> Union[float, str]:
        """Finite values as floats, infinities as "+inf" or "-inf"."""
        if self.value == math.inf:
            return "+inf"
        if self.value == -math.inf:
            return "-inf"
        return self.value

    @classmethod
    def of(cls, x: Number) -> "ExtendedReal":
        if isinstance(x, ExtendedReal):
            return x
        return cls.model_validate(x)

    # Predicates

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_pos_inf(self) -> bool:
        return self.value == math.inf

    @property
    def is_neg_inf(self) -> bool:
        return self.value == -math.inf

    def sign(self) -> int:
        if self.value > 0:
            return 1
        if self.value < 0:
            return -1
        return 0

    # Arithmetic

    def __neg__(self) -> "ExtendedReal":
        return ExtendedReal.of(-self.value)

    def __abs__(self) -> "ExtendedReal":
        return ExtendedReal.of(abs(self.value))

    def __add__(self, other: Number) -> "ExtendedReal":
        b = ExtendedReal.of(other).value
        a = self.value
        if math.isinf(a) and math.isinf(b) and a != b:
            raise IndeterminateFormError("inf - inf is indeterminate")
        return ExtendedReal.of(a + b)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "ExtendedReal":
        return self + (-ExtendedReal.of(other))

    def __rsub__(self, other: Number) -> "ExtendedReal":
        return ExtendedReal.of(other) - self

    def __mul__(self, other: Number) -> "ExtendedReal":
        a = self.value
        b = ExtendedReal.of(other).value
        if (a == 0 and math.isinf(b)) or (b == 0 and math.isinf(a)):
            raise IndeterminateFormError("0 * inf is indeterminate")
        return ExtendedReal.of(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "ExtendedReal":
        a = self.value
        b = ExtendedReal.of(other).value
        if b == 0:
            raise IndeterminateFormError("division by zero")
        if math.isinf(a) and math.isinf(b):
            raise IndeterminateFormError("inf / inf is indeterminate")
        if math.isinf(b):
            return ExtendedReal.of(0.0)
        return ExtendedReal.of(a / b)

    def __rtruediv__(self, other: Number) -> "ExtendedReal":
        return ExtendedReal.of(other) / self

    # Ordering

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (ExtendedReal, int, float)):
            return self.value == ExtendedReal.of(other).value
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __lt__(self, other: Number) -> bool:
        return self.value < ExtendedReal.of(other).value

    def __le__(self, other: Number) -> bool:
        return self.value <= ExtendedReal.of(other).value

    def __gt__(self, other: Number) -> bool:
        return self.value > ExtendedReal.of(other).value

    def __ge__(self, other: Number) -> bool:
        return self.value >= ExtendedReal.of(other).value

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"ExtendedReal({self.to_json()!r})"

    __str__ = __repr__


POS_INF = ExtendedReal.of(math.inf)
NEG_INF = ExtendedReal.of(-math.inf)
ZERO = ExtendedReal.of(0.0)
