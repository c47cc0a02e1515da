"""Exact multilinear polynomials in the variables x1, y1, ..., xk, yk.

A monomial is a bit mask over ``2k`` variable slots: bit ``2(j-1)`` is ``xj``
and bit ``2j-1`` is ``yj``.  Coefficients are Python ints, so arithmetic never
wraps.  Values are immutable once built.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

__all__ = [
    "MultilinearError",
    "MultilinearPoly",
    "Pattern",
    "SignPattern",
    "SignSequence",
    "var_name",
    "mask_of",
]

# Above this many variables dense evaluation tables stop being cheap.
_DENSE_LIMIT = 22
_INT64_SAFE = 1 << 62


class MultilinearError(ValueError):
    """Raised when an operation would leave the multilinear world."""


def var_name(index: int) -> str:
    pair, is_y = divmod(index, 2)
    return f"{'y' if is_y else 'x'}{pair + 1}"


def _var_index(name: str) -> int:
    m = re.fullmatch(r"([xy])(\d+)", name)
    if m is None or int(m.group(2)) < 1:
        raise ValueError(f"bad variable name {name!r}")
    return 2 * (int(m.group(2)) - 1) + (m.group(1) == "y")


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def _indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class SignSequence:
    """A choice of sign for each of the ``2k`` variable slots.

    ``mask`` bit ``j`` is set when slot ``j + 1`` carries ``-1``.
    """

    k: int
    mask: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.mask < 0 or self.mask >> (2 * self.k):
            raise ValueError(f"sign mask {self.mask} does not fit {2 * self.k} slots")

    @classmethod
    def from_signs(cls, signs: Sequence[int]) -> SignSequence:
        if len(signs) % 2:
            raise ValueError("a sign sequence has even length 2k")
        mask = 0
        for j, s in enumerate(signs):
            if s == -1:
                mask |= 1 << j
            elif s != 1:
                raise ValueError(f"sign must be +1 or -1, got {s!r}")
        return cls(len(signs) // 2, mask)

    @classmethod
    def from_string(cls, text: str) -> SignSequence:
        text = text.replace("−", "-")
        if any(ch not in "+-" for ch in text):
            raise ValueError(f"sign string may only contain '+' and '-': {text!r}")
        return cls.from_signs([-1 if ch == "-" else 1 for ch in text])

    @classmethod
    def all(cls, k: int) -> Iterator[SignSequence]:
        for mask in range(1 << (2 * k)):
            yield cls(k, mask)

    @property
    def length(self) -> int:
        return 2 * self.k

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(-1 if self.mask >> j & 1 else 1 for j in range(2 * self.k))

    @property
    def negatives(self) -> int:
        return bin(self.mask).count("1")

    def __getitem__(self, slot: int) -> int:
        """Sign of 0-based slot ``slot``."""
        if not 0 <= slot < 2 * self.k:
            raise IndexError(slot)
        return -1 if self.mask >> slot & 1 else 1

    def __str__(self) -> str:
        return "".join("-" if s < 0 else "+" for s in self.signs)


class Pattern(str, Enum):
    ALL_NONNEG = "AllNonneg"
    ALL_NONPOS = "AllNonpos"
    MIXED = "Mixed"
    ZERO = "Zero"


@dataclass(frozen=True)
class SignPattern:
    tag: Pattern
    # (mask of a positive term, mask of a negative term) when Mixed
    witness: tuple[int, int] | None = None

    @property
    def sign(self) -> int:
        return {Pattern.ALL_NONNEG: 1, Pattern.ALL_NONPOS: -1}.get(self.tag, 0)


class MultilinearPoly:
    """Integer polynomial in ``2k`` variables, each of degree at most one."""

    __slots__ = ("_k", "_terms", "_hash")

    def __init__(self, k: int, terms: Mapping[int, int] | None = None):
        if k < 0:
            raise ValueError("k must be non-negative")
        limit = 1 << (2 * k)
        clean = {}
        for mask, coeff in (terms or {}).items():
            if not 0 <= mask < limit:
                raise MultilinearError(f"monomial mask {mask} uses variables beyond k={k}")
            coeff = int(coeff)
            if coeff:
                clean[mask] = coeff
        self._k = k
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def _trusted(cls, k: int, terms: dict[int, int]) -> MultilinearPoly:
        # caller guarantees masks are in range and zero coefficients are gone
        p = object.__new__(cls)
        p._k = k
        p._terms = dict(sorted(terms.items()))
        p._hash = None
        return p

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, k: int) -> MultilinearPoly:
        return cls(k)

    @classmethod
    def constant(cls, k: int, c: int) -> MultilinearPoly:
        return cls(k, {0: c})

    @classmethod
    def variable(cls, k: int, index: int, coeff: int = 1) -> MultilinearPoly:
        if not 0 <= index < 2 * k:
            raise MultilinearError(f"variable index {index} out of range for k={k}")
        return cls(k, {1 << index: coeff})

    @classmethod
    def x(cls, k: int, j: int, coeff: int = 1) -> MultilinearPoly:
        """``coeff * xj`` with ``j`` 1-based."""
        return cls.variable(k, 2 * (j - 1), coeff)

    @classmethod
    def y(cls, k: int, j: int, coeff: int = 1) -> MultilinearPoly:
        return cls.variable(k, 2 * j - 1, coeff)

    # basic protocol -----------------------------------------------------

    @property
    def k(self) -> int:
        return self._k

    @property
    def nvars(self) -> int:
        return 2 * self._k

    @property
    def terms(self) -> Mapping[int, int]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self._terms.items())

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self._terms == ({0: other} if other else {})
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self._k == other._k and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._k, tuple(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"MultilinearPoly(k={self._k}, {self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    def coefficient(self, monomial: int | Iterable[int]) -> int:
        if not isinstance(monomial, int):
            monomial = mask_of(monomial)
        return self._terms.get(monomial, 0)

    def degree(self) -> int | None:
        """Total degree, or ``None`` for the zero polynomial."""
        if not self._terms:
            return None
        return max(bin(m).count("1") for m in self._terms)

    @property
    def support(self) -> int:
        """Mask of every variable that occurs in some term."""
        s = 0
        for m in self._terms:
            s |= m
        return s

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self._terms.values())

    # arithmetic ---------------------------------------------------------

    def _check_k(self, other: MultilinearPoly) -> None:
        if self._k != other._k:
            raise ValueError(f"mismatched k: {self._k} vs {other._k}")

    def add(self, other: MultilinearPoly) -> MultilinearPoly:
        self._check_k(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return MultilinearPoly._trusted(self._k, out)

    def scale(self, c: int) -> MultilinearPoly:
        c = int(c)
        if c == 0:
            return MultilinearPoly._trusted(self._k, {})
        return MultilinearPoly._trusted(self._k, {m: c * v for m, v in self._terms.items()})

    def mul_disjoint(self, other: MultilinearPoly) -> MultilinearPoly:
        """Product of two polynomials whose variable sets do not meet."""
        self._check_k(other)
        if self.support & other.support:
            shared = [var_name(i) for i in _indices(self.support & other.support)]
            raise MultilinearError(f"factors share variables {shared}")
        out: dict[int, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                # disjoint supports: every (m1, m2) pair gives a distinct mask
                out[m1 | m2] = c1 * c2
        return MultilinearPoly._trusted(self._k, out)

    def __add__(self, other):
        if isinstance(other, int):
            other = MultilinearPoly.constant(self._k, other)
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.add(other)

    __radd__ = __add__

    def __neg__(self) -> MultilinearPoly:
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, int):
            other = MultilinearPoly.constant(self._k, other)
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.add(other.scale(-1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        if isinstance(other, MultilinearPoly):
            return self.mul_disjoint(other)
        return NotImplemented

    __rmul__ = __mul__

    def lift(self, k: int) -> MultilinearPoly:
        """The same polynomial viewed in ``k >= self.k`` variable pairs."""
        if k < self._k:
            raise ValueError(f"cannot lift from k={self._k} down to k={k}")
        return MultilinearPoly._trusted(k, dict(self._terms))

    def relabel_pairs(self, perm: Sequence[int]) -> MultilinearPoly:
        """Send pair ``j`` (0-based) to pair ``perm[j]``."""
        if sorted(perm) != list(range(self._k)):
            raise ValueError("perm must be a permutation of the pairs")
        out = {}
        for m, c in self._terms.items():
            new = 0
            for j in range(self._k):
                bits = m >> (2 * j) & 3
                new |= bits << (2 * perm[j])
            out[new] = c
        return MultilinearPoly._trusted(self._k, out)

    def rotate_pairs(self, shift: int = 1) -> MultilinearPoly:
        """Cyclically relabel (x1, y1, ..., xk, yk) so pair j+shift becomes pair j."""
        if self._k == 0:
            return self
        return self.relabel_pairs([(j - shift) % self._k for j in range(self._k)])

    # substitution and evaluation ----------------------------------------

    def substitute_signs(self, sigma: SignSequence) -> MultilinearPoly:
        """Replace every variable ``v`` by ``sigma(v) * (1 + v)`` and expand."""
        if sigma.k != self._k:
            raise ValueError(f"sign sequence has length {sigma.length}, expected {self.nvars}")
        terms = dict(self._terms)
        for v in range(self.nvars):
            bit = 1 << v
            neg = sigma.mask & bit
            nxt: dict[int, int] = {}
            for m, c in terms.items():
                if m & bit:
                    if neg:
                        c = -c
                    nxt[m] = nxt.get(m, 0) + c
                    low = m ^ bit
                    nxt[low] = nxt.get(low, 0) + c
                else:
                    nxt[m] = nxt.get(m, 0) + c
            terms = {m: c for m, c in nxt.items() if c}
        return MultilinearPoly._trusted(self._k, terms)

    def evaluate(self, point: Sequence[int]) -> int:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        point = [int(v) for v in point]
        if self.nvars <= _DENSE_LIMIT and len(self._terms) > self.nvars:
            # fold one variable at a time: table[m] holds the partial sum for mask m
            table = self.to_list()
            for v in reversed(range(self.nvars)):
                half = len(table) >> 1
                val = point[v]
                table = [table[i] + val * table[i + half] for i in range(half)]
            return table[0]
        total = 0
        for m, c in self._terms.items():
            for i in _indices(m):
                c *= point[i]
            total += c
        return total

    def evaluate_many(self, points) -> np.ndarray:
        """Exact values at each row of ``points``; returns int64 or object array."""
        pts = np.asarray(points, dtype=object)
        if pts.ndim != 2 or pts.shape[1] != self.nvars:
            raise ValueError(f"points must have shape (n, {self.nvars})")
        biggest = max((abs(int(v)) for v in pts.flat), default=0)
        bound = self.l1_norm() * max(1, biggest) ** self.nvars
        dtype = np.int64 if bound < _INT64_SAFE else object
        pts = pts.astype(dtype)
        table = np.broadcast_to(self.to_dense(dtype), (len(pts), 1 << self.nvars)).copy()
        for v in reversed(range(self.nvars)):
            half = table.shape[1] >> 1
            table = table[:, :half] + pts[:, v : v + 1] * table[:, half:]
        return table[:, 0]

    def grid_values(self, values: Sequence[int] = (0, 1, 2), dtype=None) -> np.ndarray:
        """Values on the full grid ``values ** nvars``.

        Axis ``i`` of the result is variable ``nvars - 1 - i``.  Each axis is
        one small matrix product on the coefficient tensor.
        """
        vals = [int(v) for v in values]
        if dtype is None:
            bound = self.l1_norm() * max(1, *(abs(v) for v in vals)) ** self.nvars
            dtype = np.int64 if bound < _INT64_SAFE else object
        T = self.to_dense(dtype).reshape((2,) * self.nvars)
        basis = np.array([[1, v] for v in vals], dtype=dtype)
        for axis in range(self.nvars):
            T = np.moveaxis(np.tensordot(basis, T, axes=([1], [axis])), 0, axis)
        return T

    def sign_pattern(self) -> SignPattern:
        pos = neg = None
        for m, c in self._terms.items():
            if c > 0 and pos is None:
                pos = m
            elif c < 0 and neg is None:
                neg = m
            if pos is not None and neg is not None:
                return SignPattern(Pattern.MIXED, (pos, neg))
        if pos is not None:
            return SignPattern(Pattern.ALL_NONNEG)
        if neg is not None:
            return SignPattern(Pattern.ALL_NONPOS)
        return SignPattern(Pattern.ZERO)

    # dense views --------------------------------------------------------

    def to_list(self) -> list[int]:
        table = [0] * (1 << self.nvars)
        for m, c in self._terms.items():
            table[m] = c
        return table

    def to_dense(self, dtype=None) -> np.ndarray:
        """Coefficient vector indexed by mask.

        Defaults to int64 when every coefficient fits, otherwise object.
        """
        if dtype is None:
            big = max((abs(c) for c in self._terms.values()), default=0)
            dtype = np.int64 if big < _INT64_SAFE else object
        table = np.zeros(1 << self.nvars, dtype=dtype)
        for m, c in self._terms.items():
            table[m] = c
        return table

    @classmethod
    def from_dense(cls, k: int, table) -> MultilinearPoly:
        table = np.asarray(table)
        if table.shape != (1 << (2 * k),):
            raise ValueError("dense table has the wrong length")
        nz = np.flatnonzero(table)
        return cls._trusted(k, {int(m): int(table[m]) for m in nz})

    # serialization ------------------------------------------------------

    @staticmethod
    def monomial_text(mask: int) -> str:
        return "*".join(var_name(i) for i in _indices(mask))

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for n, (m, c) in enumerate(self._terms.items()):
            body = str(abs(c)) if m == 0 else f"{abs(c)}*{self.monomial_text(m)}"
            if n == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    @classmethod
    def from_text(cls, text: str, k: int | None = None) -> MultilinearPoly:
        """Parse the canonical text form (and sloppier variants of it).

        ``k`` defaults to the largest pair index mentioned.
        """
        src = text.replace("−", "-").replace(" ", "")
        if not src:
            raise ValueError("empty polynomial text")
        chunks = re.findall(r"[+-]?[^+-]+", src)
        if "".join(chunks) != src:
            raise ValueError(f"cannot parse polynomial {text!r}")
        terms: dict[int, int] = {}
        top = 0
        for chunk in chunks:
            sign = -1 if chunk[0] == "-" else 1
            body = chunk.lstrip("+-")
            coeff, mask = 1, 0
            for factor in body.split("*"):
                if re.fullmatch(r"\d+", factor):
                    coeff *= int(factor)
                    continue
                idx = _var_index(factor)
                if mask >> idx & 1:
                    raise MultilinearError(f"{factor} repeated in term {chunk!r}")
                mask |= 1 << idx
                top = max(top, idx // 2 + 1)
            terms[mask] = terms.get(mask, 0) + sign * coeff
        if k is None:
            k = top
        return cls(k, terms)

    def to_json_obj(self) -> dict:
        return {
            "k": self._k,
            "terms": [{"vars": _indices(m), "coeff": str(c)} for m, c in self._terms.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> MultilinearPoly:
        terms: dict[int, int] = {}
        for term in obj["terms"]:
            m = mask_of(term["vars"])
            if m in terms:
                raise ValueError(f"duplicate monomial {term['vars']}")
            terms[m] = int(term["coeff"])
        return cls(int(obj["k"]), terms)

    @classmethod
    def from_json(cls, text: str) -> MultilinearPoly:
        return cls.from_json_obj(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mask", "coeff"])
        for m, c in self._terms.items():
            w.writerow([m, c])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, k: int) -> MultilinearPoly:
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(k, {int(r["mask"]): int(r["coeff"]) for r in rows})
