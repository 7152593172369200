"""Parameter records and their decimal-string serialisation."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import mpmath

from ..scalar import DOUBLE, PrecisionContext

SIG_DIGITS = 25
SCALAR_FIELDS = ("a", "b", "c", "d", "e", "f", "z")


def dec(value) -> str:
    """Decimal string with 25 significant digits (floats or mpf)."""
    if isinstance(value, mpmath.mpf) or hasattr(value, "_mpf_"):
        return mpmath.nstr(value, SIG_DIGITS, min_fixed=0, max_fixed=0, strip_zeros=False)
    return format(float(value), f".{SIG_DIGITS - 1}e")


def complex_json(value) -> dict:
    return {"re": dec(value.real), "im": dec(value.imag)}


def complex_from_json(obj, ctx: PrecisionContext = DOUBLE):
    return ctx.num((obj["re"], obj["im"]))


@dataclass(frozen=True)
class ParamRecord:
    """Parameter assignment for one identity case.

    ``N`` holds the termination index (``n`` for the one-variable Jackson
    sum, ``N`` for the multiple terminating sums).  ``x`` has length ``r``
    for the multivariate identities and is empty otherwise.
    """

    q: complex
    r: int = 1
    a: Optional[complex] = None
    b: Optional[complex] = None
    c: Optional[complex] = None
    d: Optional[complex] = None
    e: Optional[complex] = None
    f: Optional[complex] = None
    z: Optional[complex] = None
    x: tuple = field(default=())
    N: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if self.r < 1:
            raise ValueError("rank r must be >= 1")

    def set_fields(self) -> list:
        return [name for name in SCALAR_FIELDS if getattr(self, name) is not None]

    def with_values(self, **kwargs) -> "ParamRecord":
        return replace(self, **kwargs)

    def in_context(self, ctx: PrecisionContext) -> "ParamRecord":
        """Copy with every number converted into ``ctx``'s field."""
        conv = {name: ctx.num(getattr(self, name)) for name in SCALAR_FIELDS
                if getattr(self, name) is not None}
        return replace(self, q=ctx.num(self.q), x=tuple(ctx.num(v) for v in self.x), **conv)

    def to_json(self) -> dict:
        out = {"q": complex_json(self.q), "r": self.r}
        for name in SCALAR_FIELDS:
            value = getattr(self, name)
            if value is not None:
                out[name] = complex_json(value)
        out["x"] = [complex_json(v) for v in self.x]
        out["N"] = self.N
        return out

    @classmethod
    def from_json(cls, obj: dict, ctx: PrecisionContext = DOUBLE) -> "ParamRecord":
        kwargs = {name: complex_from_json(obj[name], ctx) for name in SCALAR_FIELDS if name in obj}
        return cls(q=complex_from_json(obj["q"], ctx), r=int(obj["r"]),
                   x=tuple(complex_from_json(v, ctx) for v in obj.get("x", [])),
                   N=obj.get("N"), **kwargs)


