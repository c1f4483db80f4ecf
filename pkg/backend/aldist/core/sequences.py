"""
Power-law sequences and their exact limits.

A tuning sequence is c * n^(-alpha) with c > 0. A parameter sequence theta_n is
a finite sum of signed power laws, e.g. 0.5 * n^(-1/3) or 1 * n^(-1/3) + 0.2 * n^(-1/2).
Limits of the combinations that appear in the regime classification are read
off the leading term of the resulting power sum.
"""
import math
import re
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .errors import DomainError, UnresolvedCaseError
from .extended import ExtendedReal

EXPONENT_TOL = 1e-12
CANCEL_TOL = 1e-12

Term = tuple[float, float]  # (coefficient, alpha) for coefficient * n^(-alpha)


class LimitForm(str, Enum):
    RATIO = "ratio"
    PRODUCT = "product"
    SQRT_N_SCALED = "sqrt_n_scaled"


# Parsing

_SPLIT = re.compile(r"(?<![\^\(eE*])(?=[+-])")
_TERM = re.compile(
    r"^(?P<sign>[+-]?)(?P<coef>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?:\*?n\^\(?(?P<power>[+-]?(?:\d+\.?\d*|\.\d+)(?:/(?:\d+\.?\d*|\.\d+))?)\)?)?$"
)


def _parse_number(text: str) -> float:
    if "/" in text:
        sign = -1.0 if text.startswith("-") else 1.0
        num, den = text.lstrip("+-").split("/")
        return sign * float(Fraction(num) / Fraction(den))
    return float(text)


def parse_terms(text: str) -> list[Term]:
    """Parse "c*n^-a" style expressions, possibly summed, into terms."""
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise DomainError("Empty sequence expression")
    terms: list[Term] = []
    for chunk in filter(None, _SPLIT.split(compact)):
        match = _TERM.match(chunk)
        if match is None or (match.group("coef") is None and match.group("power") is None):
            raise DomainError(f"Cannot parse sequence term '{chunk}' in '{text}'")
        coef = float(match.group("coef")) if match.group("coef") else 1.0
        if match.group("sign") == "-":
            coef = -coef
        power = _parse_number(match.group("power")) if match.group("power") else 0.0
        terms.append((coef, -power))
    return terms


def format_terms(terms: Sequence[Term]) -> str:
    if not terms:
        return "0"
    parts = []
    for coef, alpha in terms:
        parts.append(f"{coef!r}" if alpha == 0 else f"{coef!r}*n^{-alpha!r}")
    return "+".join(parts).replace("+-", "-")


# Power-sum limits

def combine_terms(terms: Sequence[Term]) -> list[Term]:
    """
    Merge terms with equal exponents and drop zero coefficients.

    A merged coefficient that is nonzero but tiny relative to its parts is a
    cancellation the floating-point inputs cannot settle exactly.
    """
    ordered = sorted(terms, key=lambda t: t[1])
    merged: list[Term] = []
    scales: list[float] = []
    for coef, alpha in ordered:
        if merged and abs(merged[-1][1] - alpha) <= EXPONENT_TOL:
            merged[-1] = (merged[-1][0] + coef, merged[-1][1])
            scales[-1] = max(scales[-1], abs(coef))
        else:
            merged.append((coef, alpha))
            scales.append(abs(coef))
    out: list[Term] = []
    for (coef, alpha), scale in zip(merged, scales):
        if coef == 0.0:
            continue
        if abs(coef) <= CANCEL_TOL * scale:
            raise UnresolvedCaseError(
                f"Leading coefficients at n^{-alpha:g} nearly cancel ({coef:.3e}); "
                "the limit cannot be decided in floating point"
            )
        out.append((coef, alpha))
    return out


def leading_term(terms: Sequence[Term]) -> Optional[Term]:
    combined = combine_terms(terms)
    return combined[0] if combined else None


def power_sum_limit(terms: Sequence[Term]) -> ExtendedReal:
    """Exact limit as n -> inf of sum_i c_i * n^(-alpha_i)."""
    lead = leading_term(terms)
    if lead is None:
        return ExtendedReal.of(0.0)
    coef, alpha = lead
    if abs(alpha) <= EXPONENT_TOL:
        return ExtendedReal.of(coef)
    if alpha > 0:
        return ExtendedReal.of(0.0)
    return ExtendedReal.of(math.copysign(math.inf, coef))


def scale_terms(terms: Sequence[Term], coef: float, alpha: float) -> list[Term]:
    """Multiply every term by coef * n^(-alpha)."""
    return [(c * coef, a + alpha) for c, a in terms]


def multiply_terms(left: Sequence[Term], right: Sequence[Term]) -> list[Term]:
    return [(c1 * c2, a1 + a2) for c1, a1 in left for c2, a2 in right]


# Sequence types

class PowerLawSequence(BaseModel):
    """c * n^(-alpha) with c > 0."""

    coef: float = Field(..., gt=0, description="Positive coefficient c")
    exponent: float = Field(..., description="Decay exponent alpha")

    @field_validator("coef", "exponent")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @classmethod
    def parse(cls, text: str) -> "PowerLawSequence":
        terms = parse_terms(text)
        if len(terms) != 1:
            raise DomainError(f"A tuning rule must be a single term c*n^-a, got '{text}'")
        coef, alpha = terms[0]
        if coef <= 0:
            raise DomainError(f"Tuning coefficient must be positive, got {coef}")
        return cls(coef=coef, exponent=alpha)

    def eval(self, n: Union[int, float, np.ndarray]):
        return self.coef * np.power(np.asarray(n, dtype=float), -self.exponent)

    def terms(self) -> list[Term]:
        return [(self.coef, self.exponent)]

    def __str__(self) -> str:
        return format_terms(self.terms())


class ThetaSequence(BaseModel):
    """Finite sum of signed power laws; the empty sum is the zero sequence."""

    components: list[tuple[float, float]] = Field(
        default_factory=list, description="(coefficient, alpha) pairs for coefficient * n^(-alpha)"
    )

    @classmethod
    def parse(cls, text: str) -> "ThetaSequence":
        return cls(components=[t for t in parse_terms(text) if t[0] != 0.0])

    @classmethod
    def power(cls, coef: float, exponent: float = 0.0, offset: float = 0.0) -> "ThetaSequence":
        """coef * n^(-exponent) + offset * n^(-1/2)."""
        comps = []
        if coef != 0.0:
            comps.append((float(coef), float(exponent)))
        if offset != 0.0:
            comps.append((float(offset), 0.5))
        return cls(components=comps)

    @classmethod
    def constant(cls, value: float) -> "ThetaSequence":
        return cls.power(value, 0.0)

    def eval(self, n: Union[int, float, np.ndarray]):
        n_arr = np.asarray(n, dtype=float)
        total = np.zeros_like(n_arr)
        for coef, alpha in self.components:
            total = total + coef * np.power(n_arr, -alpha)
        return total if total.ndim else float(total)

    def terms(self) -> list[Term]:
        return [tuple(c) for c in self.components]

    @property
    def is_zero(self) -> bool:
        return not combine_terms(self.terms())

    def __str__(self) -> str:
        return format_terms(self.terms())


SequenceLike = Union[PowerLawSequence, ThetaSequence]


def limit_of(
    seq_a: SequenceLike,
    seq_b: Optional[SequenceLike] = None,
    form: Union[LimitForm, str] = LimitForm.SQRT_N_SCALED,
) -> ExtendedReal:
    """
    Exact limit of a/b, a*b or n^{1/2} a as n -> inf.

    For a ratio only the leading term of the denominator matters, since
    b_n / lead(b_n) -> 1.
    """
    form = LimitForm(form)
    a_terms = seq_a.terms()
    if form is LimitForm.SQRT_N_SCALED:
        return power_sum_limit(scale_terms(a_terms, 1.0, -0.5))
    if seq_b is None:
        raise DomainError(f"Form '{form.value}' needs a second sequence")
    b_terms = seq_b.terms()
    if form is LimitForm.PRODUCT:
        return power_sum_limit(multiply_terms(a_terms, b_terms))
    lead = leading_term(b_terms)
    if lead is None:
        raise DomainError("Ratio with an identically zero denominator")
    coef, alpha = lead
    return power_sum_limit(scale_terms(a_terms, 1.0 / coef, -alpha))
