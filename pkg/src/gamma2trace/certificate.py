"""Exact checks of the finite algebraic facts behind the sign-coherence proof.

Every check records structured failures instead of stopping, so one run gives
the full inventory.  Matrix constants can be overridden, which is how the
negative controls corrupt them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping

from .matrices import (
    ALPHABET,
    CONSTANTS,
    M_TABLE,
    TAU,
    GenWord,
    IntMatrix2,
    PolyMatrix2,
    compute_F,
    is_decreasing,
    m_table,
    trace_comb,
)
from .polynomial import MultilinearPoly, SignSequence
from .verify import extend_sigma, goodness

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "Failure",
    "CertificateReport",
    "check_linear_identities",
    "check_word_identities",
    "check_cone_decompositions",
    "check_recursion",
    "check_base_equivalence",
    "enumerate_delta",
    "check_delta_properties",
    "check_closure",
    "full_certificate",
    "BASE_FIXTURES",
    "base_hypothesis",
    "random_matrices",
    "recursion_sides",
    "CONE_DECOMPOSITIONS",
]


@dataclass
class Failure:
    check: str
    detail: dict

    def to_json_obj(self) -> dict:
        return {"check": self.check, **self.detail}


@dataclass
class CertificateReport:
    identities_ok: bool = True
    recursion_ok: bool = True
    recursion_tested: int = 0
    base_case_ok: bool = True
    base_case_tested: int = 0
    base_case_skipped: int = 0
    cone_ok: bool = True
    delta_depth: int = 0
    delta_ok: bool = True
    delta_words: int = 0
    delta_collisions: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.identities_ok and self.recursion_ok and self.base_case_ok and self.cone_ok and self.delta_ok

    def to_json_obj(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "ok": self.ok,
            "identities": {"ok": self.identities_ok},
            "cone": {"ok": self.cone_ok},
            "recursion": {"ok": self.recursion_ok, "tested": self.recursion_tested},
            "base_case": {
                "ok": self.base_case_ok,
                "tested": self.base_case_tested,
                "skipped": self.base_case_skipped,
            },
            "delta": {
                "ok": self.delta_ok,
                "depth": self.delta_depth,
                "words": self.delta_words,
                "collisions": self.delta_collisions,
            },
            "failures": [f.to_json_obj() for f in self.failures],
        }

    def rows(self) -> list[tuple[str, bool, int]]:
        """(check, ok, instances) for tabular output."""
        return [
            ("identities", self.identities_ok, 11),
            ("cone", self.cone_ok, 5),
            ("recursion", self.recursion_ok, self.recursion_tested),
            ("base_case", self.base_case_ok, self.base_case_tested),
            ("delta", self.delta_ok, self.delta_words),
        ]


def _consts(consts: Mapping[str, IntMatrix2] | None) -> Mapping[str, IntMatrix2]:
    return CONSTANTS if consts is None else consts


def _compare(name: str, lhs: IntMatrix2, rhs: IntMatrix2, failures: list[Failure] | None) -> bool:
    if lhs == rhs:
        return True
    if failures is not None:
        failures.append(Failure(name, {"identity": name, "lhs": lhs.rows(), "rhs": rhs.rows()}))
    return False


def check_linear_identities(consts=None, failures: list[Failure] | None = None) -> bool:
    C = _consts(consts)
    cases = [
        ("A4 + A5 = 4 A2", C["A4"] + C["A5"], 4 * C["A2"]),
        ("A4 + A6 = 4 A3t", C["A4"] + C["A6"], 4 * C["A3t"]),
        ("A4t + A5 = 4 A2t", C["A4t"] + C["A5"], 4 * C["A2t"]),
        ("A4t + A6 = 4 A3", C["A4t"] + C["A6"], 4 * C["A3"]),
        ("A2 + A3 = 4 A1", C["A2"] + C["A3"], 4 * C["A1"]),
    ]
    # evaluate all of them: the caller wants every failing identity
    results = [_compare(name, lhs, rhs, failures) for name, lhs, rhs in cases]
    return all(results)


def check_word_identities(consts=None, failures: list[Failure] | None = None) -> bool:
    C = _consts(consts)
    A, B, Ai, Bi = C["A"], C["B"], C["A_inv"], C["B_inv"]
    cases = [
        ("A * A_inv = E", A @ Ai, C["E"]),
        ("B * B_inv = E", B @ Bi, C["E"]),
        ("A4 = -A_inv B_inv", C["A4"], -(Ai @ Bi)),
        ("A4t = -A B", C["A4t"], -(A @ B)),
        ("A5 = A B_inv", C["A5"], A @ Bi),
        ("A6 = A_inv B", C["A6"], Ai @ B),
    ]
    results = [_compare(name, lhs, rhs, failures) for name, lhs, rhs in cases]
    return all(results)


# Each left factor of the M^{ij} table as a nonnegative combination of the
# generators, scaled by ``denominator`` so everything stays integral:
# denominator * scalar * constant == sum(weight * generator).
CONE_DECOMPOSITIONS: tuple[tuple[int, str, int, Mapping[str, int]], ...] = (
    (2, "A2", 2, {"A4": 1, "A5": 1}),
    (2, "A2t", 2, {"A4t": 1, "A5": 1}),
    (2, "A3", 2, {"A4t": 1, "A6": 1}),
    (2, "A3t", 2, {"A4": 1, "A6": 1}),
    (4, "A1", 4, {"A4": 1, "A4t": 1, "A5": 1, "A6": 1}),
)


def check_cone_decompositions(consts=None, failures: list[Failure] | None = None) -> bool:
    C = _consts(consts)
    ok = True
    for scalar, name, denom, weights in CONE_DECOMPOSITIONS:
        label = f"{denom}*{scalar}{name} = " + " + ".join(f"{w}*{g}" for g, w in weights.items())
        if any(w < 0 for w in weights.values()):
            ok = False
            if failures is not None:
                failures.append(Failure("cone", {"identity": label, "reason": "negative weight"}))
            continue
        rhs = IntMatrix2(0, 0, 0, 0)
        for g, w in weights.items():
            rhs = rhs + w * C[g]
        ok &= _compare("cone", (denom * scalar) * C[name], rhs, failures)
    return ok


def check_closure(M: IntMatrix2, consts=None, failures: list[Failure] | None = None) -> bool:
    """Each M^{ij} is the checked nonnegative combination of {A4 M, A4t M, A5 M, A6 M}."""
    C = _consts(consts)
    ok = True
    by_left = {(scalar, name): (denom, weights) for scalar, name, denom, weights in CONE_DECOMPOSITIONS}
    for i in range(4):
        for j in range(3):
            denom, weights = by_left[M_TABLE[i][j]]
            rhs = IntMatrix2(0, 0, 0, 0)
            for g, w in weights.items():
                rhs = rhs + w * (C[g] @ M)
            ok &= _compare(f"closure M^{i}{j}", denom * m_table(M, i, j, C), rhs, failures)
    return ok


# recursion ---------------------------------------------------------------


@lru_cache(maxsize=4096)
def _F_sigma(k: int, mask: int) -> PolyMatrix2:
    return compute_F(k).substitute_signs(SignSequence(k, mask))


@lru_cache(maxsize=4096)
def _fresh_monomials(k: int) -> tuple[MultilinearPoly, MultilinearPoly, MultilinearPoly, MultilinearPoly]:
    """x_{k+1} y_{k+1}, x_{k+1}, y_{k+1}, 1 in 2k+2 variables."""
    n = k + 1
    xy = MultilinearPoly(n, {(1 << 2 * k) | (1 << 2 * k + 1): 1})
    return xy, MultilinearPoly.x(n, n), MultilinearPoly.y(n, n), MultilinearPoly.constant(n, 1)


def recursion_sides(k: int, sigma: SignSequence, i: int, M: IntMatrix2, consts=None) -> tuple[MultilinearPoly, MultilinearPoly]:
    """Both sides of the one-step trace recursion as polynomials in 2k+2 variables.

    Left: tr(F_{k+1}^{sigma_i} M).  Right: (-1)^tau(i) times the sum over j of
    (fresh monomial j) * tr(F_k^sigma M^{ij}).
    """
    if sigma.k != k:
        raise ValueError(f"sign sequence has length {sigma.length}, expected {2 * k}")
    ext = extend_sigma(sigma, i)
    lhs = trace_comb(_F_sigma(k + 1, ext.mask), M)
    F = _F_sigma(k, sigma.mask)
    rhs = MultilinearPoly.zero(k + 1)
    for j, mono in enumerate(_fresh_monomials(k)):
        part = trace_comb(F, m_table(M, i, j, consts)).lift(k + 1)
        rhs = rhs + mono.mul_disjoint(part)
    if TAU[i]:
        rhs = -rhs
    return lhs, rhs


def check_recursion(k: int, sigma: SignSequence, i: int, M: IntMatrix2, consts=None) -> bool:
    lhs, rhs = recursion_sides(k, sigma, i, M, consts)
    return lhs == rhs


def random_matrices(n: int, seed: int, lo: int = -3, hi: int = 3) -> list[IntMatrix2]:
    rng = random.Random(seed)
    return [IntMatrix2(*(rng.randint(lo, hi) for _ in range(4))) for _ in range(n)]


# base case ---------------------------------------------------------------

# hand-picked matrices around the boundary of the base-case criterion
BASE_FIXTURES: tuple[IntMatrix2, ...] = (
    IntMatrix2(1, 0, 0, -3),
    IntMatrix2(1, 0, 0, -5),
    IntMatrix2(1, 0, 0, -6),
    IntMatrix2(2, 3, -3, 1),
    IntMatrix2(1, 2, 2, 1),
    IntMatrix2(3, -1, 4, -2),
)


def base_hypothesis(M: IntMatrix2, consts=None) -> bool:
    return M.a > 0 and all(m_table(M, i, j, consts).a > 0 for i in range(4) for j in range(4))


def check_base_equivalence(M: IntMatrix2, consts=None) -> bool | None:
    """Goodness of a f_1 + b h_1 + c t_1 + d g_1 versus tr(M^{i3}) >= 0 for all i.

    Returns None when the hypothesis (a > 0, every M^{ij} has positive (1,1)
    entry) is not met.
    """
    if not base_hypothesis(M, consts):
        return None
    good = goodness(trace_comb(compute_F(1), M)).all_good
    traces_ok = all(m_table(M, i, 3, consts).trace() >= 0 for i in range(4))
    return good == traces_ok


# Delta -------------------------------------------------------------------


def enumerate_delta(max_len: int, consts=None) -> Iterator[tuple[GenWord, IntMatrix2]]:
    """Words over {A4, A4t, A5, A6} up to ``max_len`` with their matrices."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    gens = [(g, g.matrix(consts)) for g in ALPHABET]
    level = [((), IntMatrix2.identity())]
    yield GenWord(), IntMatrix2.identity()
    for _ in range(max_len):
        level = [(w + (g,), M @ G) for w, M in level for g, G in gens]
        for w, M in level:
            yield GenWord(w), M


def check_delta_properties(L: int, consts=None, failures: list[Failure] | None = None, max_failures: int = 20) -> tuple[bool, int, int]:
    """Positivity, decreasing, trace and inductive-step checks on all words up to L.

    Returns (ok, words checked, matrix collisions between distinct words).
    """
    if L < 1:
        raise ValueError("depth must be at least 1")
    gens = [(g, g.matrix(consts)) for g in ALPHABET]
    ok = True
    n_fail = 0
    seen: dict[IntMatrix2, GenWord] = {}
    collisions = 0
    n_words = 0

    def fail(word: GenWord, prop: str, M: IntMatrix2, **extra) -> None:
        nonlocal ok, n_fail
        ok = False
        n_fail += 1
        if failures is not None and n_fail <= max_failures:
            failures.append(Failure("delta", {"word": str(word), "property": prop, "matrix": M.rows(), **extra}))

    for word, M in enumerate_delta(L, consts):
        if M in seen:
            collisions += 1
            if failures is not None:
                failures.append(Failure("delta", {"word": str(word), "property": "collision", "other": str(seen[M])}))
        else:
            seen[M] = word
        if not word.letters:
            continue
        n_words += 1
        a = M.a
        dec = is_decreasing(M)
        if a <= 0:
            fail(word, "a > 0", M)
        if not dec:
            fail(word, "decreasing", M)
        if a > 0 and dec and M.trace() <= 0:
            fail(word, "trace > 0", M)
        for g, G in gens:
            tr = (G @ M).trace()
            if tr < 0:
                fail(word, "tr(CM) >= 0", M, generator=g.value, trace=tr)
            # inductive step: right-multiplying by a generator keeps the invariant
            if a > 0 and dec:
                N = M @ G
                if not (N.a > 0 and is_decreasing(N)):
                    fail(word, "inductive step", M, generator=g.value, product=N.rows())
    return ok, n_words, collisions


def full_certificate(L: int = 8, k_max: int = 4, sample_M: int = 50, seed: int = 0, consts=None) -> CertificateReport:
    """Run every check and aggregate; nothing aborts early."""
    if L < 1 or k_max < 1:
        raise ValueError("depth and k_max must be at least 1")
    C = _consts(consts)
    rep = CertificateReport(delta_depth=L)
    fails = rep.failures

    lin = check_linear_identities(C, fails)
    word = check_word_identities(C, fails)
    rep.identities_ok = lin and word
    rep.cone_ok = check_cone_decompositions(C, fails)

    base_words = [M for _, M in enumerate_delta(min(L, 3), C)]
    for M in base_words:
        rep.cone_ok &= check_closure(M, C, fails)

    for M in base_words + list(BASE_FIXTURES):
        verdict = check_base_equivalence(M, C)
        if verdict is None:
            rep.base_case_skipped += 1
            continue
        rep.base_case_tested += 1
        if not verdict:
            rep.base_case_ok = False
            fails.append(Failure("base_case", {"matrix": M.rows()}))

    sample = [M for _, M in enumerate_delta(2, C)] + random_matrices(sample_M, seed)
    for k in range(k_max):
        for sigma in SignSequence.all(k):
            for i in range(4):
                for M in sample:
                    rep.recursion_tested += 1
                    if not check_recursion(k, sigma, i, M, C):
                        rep.recursion_ok = False
                        fails.append(
                            Failure("recursion", {"k": k, "sigma": str(sigma), "i": i, "matrix": M.rows()})
                        )

    delta_ok, rep.delta_words, rep.delta_collisions = check_delta_properties(L, C, fails)
    rep.delta_ok = delta_ok and rep.delta_collisions == 0
    return rep
