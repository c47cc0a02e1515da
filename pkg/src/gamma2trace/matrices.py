"""2x2 integer and polynomial matrices for words in Gamma(2).

Entries follow the layout ``M = (a c; b d)``: ``c`` is the (1,2) entry and
``b`` the (2,1) entry.  With that naming ``tr(F M) = a*f + b*h + c*t + d*g``
for ``F = (f h; t g)``.  Serializers always emit row-major ``[[a, c], [b, d]]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .polynomial import MultilinearPoly, SignSequence

__all__ = [
    "IntMatrix2",
    "PolyMatrix2",
    "Generator",
    "GenWord",
    "CONSTANTS",
    "M_TABLE",
    "TAU",
    "constants",
    "sym_power_A",
    "sym_power_B",
    "compute_F",
    "compute_F_sigma",
    "trace_comb",
    "m_table",
    "word_to_matrix",
    "is_decreasing",
    "power_A",
    "power_B",
    "p_k",
    "enumerate_words",
    "ALPHABET",
]


@dataclass(frozen=True, slots=True)
class IntMatrix2:
    """Exact integer matrix ``(a c; b d)``; positional order is row-major."""

    a: int
    c: int
    b: int
    d: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> IntMatrix2:
        (a, c), (b, d) = rows
        return cls(int(a), int(c), int(b), int(d))

    @classmethod
    def parse(cls, text: str) -> IntMatrix2:
        """Row-major literal ``[[a,c],[b,d]]``."""
        try:
            rows = json.loads(text)
            return cls.from_rows(rows)
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad matrix literal {text!r}; expected [[a,c],[b,d]]") from exc

    @classmethod
    def identity(cls) -> IntMatrix2:
        return cls(1, 0, 0, 1)

    def rows(self) -> list[list[int]]:
        return [[self.a, self.c], [self.b, self.d]]

    def __matmul__(self, other: IntMatrix2) -> IntMatrix2:
        a, c, b, d = self.a, self.c, self.b, self.d
        a2, c2, b2, d2 = other.a, other.c, other.b, other.d
        return IntMatrix2(a * a2 + c * b2, a * c2 + c * d2, b * a2 + d * b2, b * c2 + d * d2)

    def __add__(self, other: IntMatrix2) -> IntMatrix2:
        return IntMatrix2(self.a + other.a, self.c + other.c, self.b + other.b, self.d + other.d)

    def __sub__(self, other: IntMatrix2) -> IntMatrix2:
        return self + (-other)

    def __neg__(self) -> IntMatrix2:
        return IntMatrix2(-self.a, -self.c, -self.b, -self.d)

    def __mul__(self, s: int) -> IntMatrix2:
        if not isinstance(s, int):
            return NotImplemented
        return IntMatrix2(s * self.a, s * self.c, s * self.b, s * self.d)

    __rmul__ = __mul__

    @property
    def T(self) -> IntMatrix2:
        return IntMatrix2(self.a, self.b, self.c, self.d)

    def trace(self) -> int:
        return self.a + self.d

    def det(self) -> int:
        return self.a * self.d - self.c * self.b

    def to_json_obj(self) -> dict:
        return {"a": str(self.a), "c": str(self.c), "b": str(self.b), "d": str(self.d)}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> IntMatrix2:
        return cls(int(obj["a"]), int(obj["c"]), int(obj["b"]), int(obj["d"]))

    def __str__(self) -> str:
        return f"[[{self.a},{self.c}],[{self.b},{self.d}]]"


def power_A(m: int) -> IntMatrix2:
    return IntMatrix2(1, 2 * m, 0, 1)


def power_B(n: int) -> IntMatrix2:
    return IntMatrix2(1, 0, -2 * n, 1)


_A = IntMatrix2(1, 2, 0, 1)
_B = IntMatrix2(1, 0, -2, 1)
_A2 = IntMatrix2(2, 1, 0, 0)
_A3 = IntMatrix2(2, -1, 0, 0)
_A4 = IntMatrix2(3, 2, -2, -1)

CONSTANTS: Mapping[str, IntMatrix2] = {
    "E": IntMatrix2.identity(),
    "A": _A,
    "B": _B,
    "A_inv": power_A(-1),
    "B_inv": power_B(-1),
    "A1": IntMatrix2(1, 0, 0, 0),
    "A2": _A2,
    "A3": _A3,
    "A4": _A4,
    "A5": IntMatrix2(5, 2, 2, 1),
    "A6": IntMatrix2(5, -2, -2, 1),
    "A2t": _A2.T,
    "A3t": _A3.T,
    "A4t": _A4.T,
}


def constants() -> dict[str, IntMatrix2]:
    return dict(CONSTANTS)


# Left factors of M^{ij} as (scalar, constant name); row i, column j.
M_TABLE: tuple[tuple[tuple[int, str], ...], ...] = (
    ((4, "A1"), (2, "A3"), (2, "A2t"), (1, "A4t")),
    ((4, "A1"), (2, "A2"), (2, "A2t"), (1, "A5")),
    ((4, "A1"), (2, "A3"), (2, "A3t"), (1, "A6")),
    ((4, "A1"), (2, "A2"), (2, "A3t"), (1, "A4")),
)
# overall sign of tr(F_{k+1}^{sigma_i} M) is (-1)^TAU[i]
TAU = (1, 0, 0, 1)


def m_table(M: IntMatrix2, i: int, j: int, consts: Mapping[str, IntMatrix2] | None = None) -> IntMatrix2:
    if not (0 <= i < 4 and 0 <= j < 4):
        raise ValueError("i and j must lie in 0..3")
    consts = CONSTANTS if consts is None else consts
    scalar, name = M_TABLE[i][j]
    return scalar * (consts[name] @ M)


class Generator(str, Enum):
    A4 = "4"
    A4t = "T"
    A5 = "5"
    A6 = "6"

    @property
    def constant_name(self) -> str:
        return {"4": "A4", "T": "A4t", "5": "A5", "6": "A6"}[self.value]

    def matrix(self, consts: Mapping[str, IntMatrix2] | None = None) -> IntMatrix2:
        consts = CONSTANTS if consts is None else consts
        return consts[self.constant_name]


# length-lexicographic enumeration order of the alphabet
ALPHABET: tuple[Generator, ...] = (Generator.A4, Generator.A4t, Generator.A5, Generator.A6)


@dataclass(frozen=True)
class GenWord:
    letters: tuple[Generator, ...] = ()

    @classmethod
    def parse(cls, text: str) -> GenWord:
        try:
            return cls(tuple(Generator(ch) for ch in text))
        except ValueError as exc:
            raise ValueError(f"bad word {text!r}; letters are 4, T, 5, 6") from exc

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: GenWord) -> GenWord:
        return GenWord(self.letters + other.letters)

    def __str__(self) -> str:
        return "".join(g.value for g in self.letters)

    def __repr__(self) -> str:
        return f"GenWord({str(self)!r})"


def word_to_matrix(word: GenWord | Iterable[Generator], consts: Mapping[str, IntMatrix2] | None = None) -> IntMatrix2:
    letters = word.letters if isinstance(word, GenWord) else word
    M = IntMatrix2.identity()
    for g in letters:
        M = M @ g.matrix(consts)
    return M


def is_decreasing(M: IntMatrix2) -> bool:
    a, b, c, d = abs(M.a), abs(M.b), abs(M.c), abs(M.d)
    return a > b > d and a > c > d


@dataclass(frozen=True)
class PolyMatrix2:
    """``(f h; t g)`` with multilinear polynomial entries sharing one ``k``."""

    f: MultilinearPoly
    h: MultilinearPoly
    t: MultilinearPoly
    g: MultilinearPoly

    def __post_init__(self):
        if len({self.f.k, self.h.k, self.t.k, self.g.k}) != 1:
            raise ValueError("all entries must share the same k")

    @property
    def k(self) -> int:
        return self.f.k

    @classmethod
    def identity(cls, k: int) -> PolyMatrix2:
        one, zero = MultilinearPoly.constant(k, 1), MultilinearPoly.zero(k)
        return cls(one, zero, zero, one)

    def entries(self) -> tuple[MultilinearPoly, MultilinearPoly, MultilinearPoly, MultilinearPoly]:
        return self.f, self.h, self.t, self.g

    def __matmul__(self, other: PolyMatrix2) -> PolyMatrix2:
        # every product F_k builds has factors with disjoint variables
        return PolyMatrix2(
            self.f * other.f + self.h * other.t,
            self.f * other.h + self.h * other.g,
            self.t * other.f + self.g * other.t,
            self.t * other.h + self.g * other.g,
        )

    def trace(self) -> MultilinearPoly:
        return self.f + self.g

    def det_is_one(self) -> bool:
        """Whether ``f*g - h*t`` is the constant polynomial 1.

        The determinant has degree at most 2 in each variable, so it is fixed
        by its values on ``{0, 1, 2}^{2k}``; no symbolic product is formed.
        """
        bound = max(p.l1_norm() for p in self.entries()) * 2 ** self.f.nvars
        dtype = np.int64 if 2 * bound * bound + 1 < 1 << 62 else object
        f, h, t, g = (p.grid_values((0, 1, 2), dtype) for p in self.entries())
        return bool(np.all(f * g - h * t == 1))

    def map(self, fn) -> PolyMatrix2:
        return PolyMatrix2(fn(self.f), fn(self.h), fn(self.t), fn(self.g))

    def substitute_signs(self, sigma: SignSequence) -> PolyMatrix2:
        return self.map(lambda p: p.substitute_signs(sigma))

    def lift(self, k: int) -> PolyMatrix2:
        return self.map(lambda p: p.lift(k))


def _check_pair(k: int, j: int) -> None:
    if not 1 <= j <= k:
        raise ValueError(f"pair index {j} outside 1..{k}")


def _exponent(k: int, index: int, substituted: bool, sign: int) -> MultilinearPoly:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    var = MultilinearPoly.variable(k, index)
    return sign * (var + 1) if substituted else var


def sym_power_A(k: int, j: int, substituted: bool = False, sign: int = 1) -> PolyMatrix2:
    """``A^{xj}``, or ``A^{sign(1+xj)}`` when substituted, as ``(1 2e; 0 1)``."""
    _check_pair(k, j)
    e = _exponent(k, 2 * (j - 1), substituted, sign)
    one, zero = MultilinearPoly.constant(k, 1), MultilinearPoly.zero(k)
    return PolyMatrix2(one, 2 * e, zero, one)


def sym_power_B(k: int, j: int, substituted: bool = False, sign: int = 1) -> PolyMatrix2:
    """``B^{yj}`` as ``(1 0; -2e 1)``."""
    _check_pair(k, j)
    e = _exponent(k, 2 * j - 1, substituted, sign)
    one, zero = MultilinearPoly.constant(k, 1), MultilinearPoly.zero(k)
    return PolyMatrix2(one, zero, -2 * e, one)


@lru_cache(maxsize=None)
def compute_F(k: int) -> PolyMatrix2:
    """``A^{x1} B^{y1} ... A^{xk} B^{yk}`` as a symbolic matrix."""
    if k < 0:
        raise ValueError("k must be non-negative")
    F = PolyMatrix2.identity(k)
    for j in range(1, k + 1):
        F = F @ sym_power_A(k, j) @ sym_power_B(k, j)
    return F


def compute_F_sigma(k: int, sigma: SignSequence) -> PolyMatrix2:
    """Product of the sign-substituted powers ``A^{s(1+xj)} B^{s'(1+yj)}``."""
    if sigma.k != k:
        raise ValueError(f"sign sequence has length {sigma.length}, expected {2 * k}")
    F = PolyMatrix2.identity(k)
    for j in range(1, k + 1):
        F = (
            F
            @ sym_power_A(k, j, substituted=True, sign=sigma[2 * j - 2])
            @ sym_power_B(k, j, substituted=True, sign=sigma[2 * j - 1])
        )
    return F


def trace_comb(F: PolyMatrix2, M: IntMatrix2) -> MultilinearPoly:
    """``tr(F M) = a*f + b*h + c*t + d*g``."""
    terms: dict[int, int] = {}
    for poly, s in ((F.f, M.a), (F.h, M.b), (F.t, M.c), (F.g, M.d)):
        if not s:
            continue
        for m, v in poly:
            terms[m] = terms.get(m, 0) + s * v
    return MultilinearPoly(F.k, terms)


def p_k(k: int) -> MultilinearPoly:
    """The trace polynomial ``tr F_k``."""
    return compute_F(k).trace()


def enumerate_words(max_len: int) -> Iterator[GenWord]:
    """All words of length <= max_len, shortest first, then lexicographic."""
    level = [()]
    yield GenWord()
    for _ in range(max_len):
        level = [w + (g,) for w in level for g in ALPHABET]
        for w in level:
            yield GenWord(w)
