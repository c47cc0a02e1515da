"""Exhaustive sign-coherence checks over every sign sequence.

A sweep applies the substitution ``v -> s(1+v)`` for all ``4^k`` sign
sequences at once.  On the dense coefficient vector a single-variable
substitution is a butterfly: the ``v = 1`` half is multiplied by ``s`` and
then added into the ``v = 0`` half.  Every coefficient that appears along the
way is a signed sum of original coefficients, so the L1 norm of the input
bounds all intermediate values; int64 is used only when that bound fits.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matrices import IntMatrix2, compute_F, power_A, power_B, p_k, trace_comb
from .polynomial import MultilinearPoly, Pattern, SignPattern, SignSequence

__all__ = [
    "GoodnessReport",
    "extend_sigma",
    "predicted_sign",
    "goodness",
    "verify_theorem",
    "verify_comb_good",
    "numeric_oracle",
    "oracle_trials",
    "OracleReport",
]

_INT64_SAFE = 1 << 62
_CHUNK_ELEMENTS = 1 << 22

_TAG_CODE = {0: Pattern.ZERO, 1: Pattern.ALL_NONNEG, 2: Pattern.ALL_NONPOS, 3: Pattern.MIXED}


def extend_sigma(sigma: SignSequence, i: int) -> SignSequence:
    """Append two signs: i=0 (+,+), 1 (+,-), 2 (-,+), 3 (-,-)."""
    if not 0 <= i < 4:
        raise ValueError("i must lie in 0..3")
    n = 2 * sigma.k
    tail = (i >> 1 & 1) << n | (i & 1) << (n + 1)
    return SignSequence(sigma.k + 1, sigma.mask | tail)


def predicted_sign(k: int, sigma: SignSequence) -> int:
    return -1 if (k + sigma.negatives) % 2 else 1


@dataclass
class GoodnessReport:
    k: int
    all_good: bool
    # None when no reference sign applies (e.g. a combination with a = 0)
    sign_formula_holds: bool | None
    counts: dict[str, int]
    n_terms: int
    counterexample: dict | None = None
    sign_violation: dict | None = None
    per_sigma: dict[int, SignPattern] | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.all_good and self.sign_formula_holds is not False

    def to_json_obj(self, include_per_sigma: bool = False) -> dict:
        out = {
            "k": self.k,
            "all_good": self.all_good,
            "sign_formula_holds": self.sign_formula_holds,
            "n_sigma": 4**self.k,
            "n_terms": self.n_terms,
            "counts": self.counts,
            "counterexample": self.counterexample,
            "sign_violation": self.sign_violation,
        }
        if include_per_sigma and self.per_sigma is not None:
            out["per_sigma"] = [
                {
                    "sigma": str(SignSequence(self.k, mask)),
                    "mask": mask,
                    "pattern": pat.tag.value,
                    "witness": list(pat.witness) if pat.witness else None,
                }
                for mask, pat in sorted(self.per_sigma.items())
            ]
        return out


def _sweep_chunk(table: np.ndarray, nvars: int, start: int, stop: int):
    """Substitute every sign mask in [start, stop) and classify the results.

    Returns (codes, first positive mask, first negative mask) per sequence.
    """
    masks = np.arange(start, stop, dtype=np.int64)
    X = np.broadcast_to(table, (len(masks), table.shape[0])).copy()
    for v in range(nvars):
        signs = np.where((masks >> v) & 1, -1, 1).astype(X.dtype)
        view = X.reshape(len(masks), -1, 2, 1 << v)
        view[:, :, 1, :] *= signs[:, None, None]
        view[:, :, 0, :] += view[:, :, 1, :]
    pos = X > 0
    neg = X < 0
    has_pos = pos.any(axis=1)
    has_neg = neg.any(axis=1)
    codes = has_pos.astype(np.int8) + 2 * has_neg.astype(np.int8)
    first_pos = np.where(has_pos, pos.argmax(axis=1), -1)
    first_neg = np.where(has_neg, neg.argmax(axis=1), -1)
    return codes, first_pos, first_neg


_worker_table: np.ndarray | None = None


def _init_worker(table: np.ndarray) -> None:
    global _worker_table
    _worker_table = table


def _worker_chunk(args):
    nvars, start, stop = args
    return _sweep_chunk(_worker_table, nvars, start, stop)


def sweep(p: MultilinearPoly, jobs: int = 1):
    """Sign pattern data for ``p^sigma`` over all sigma, ordered by mask."""
    nvars = p.nvars
    dtype = np.int64 if p.l1_norm() < _INT64_SAFE else object
    table = p.to_dense(dtype)
    total = 1 << nvars
    step = max(1, _CHUNK_ELEMENTS >> nvars)
    if jobs > 1:
        step = min(step, -(-total // jobs))
    bounds = [(nvars, s, min(s + step, total)) for s in range(0, total, step)]
    if jobs > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(table,)) as pool:
            parts = list(pool.map(_worker_chunk, bounds))
    else:
        parts = [_sweep_chunk(table, *b) for b in bounds]
    # chunks come back in submission order, so concatenation is keyed by mask
    codes = np.concatenate([c for c, _, _ in parts])
    first_pos = np.concatenate([fp for _, fp, _ in parts])
    first_neg = np.concatenate([fn for _, _, fn in parts])
    return codes, first_pos, first_neg


def _parity(masks: np.ndarray) -> np.ndarray:
    par = np.zeros_like(masks)
    m = masks.copy()
    while m.any():
        par ^= m & 1
        m >>= 1
    return par


def goodness(
    p: MultilinearPoly,
    reference_sign: int | None = None,
    jobs: int = 1,
    keep_per_sigma: bool = False,
) -> GoodnessReport:
    """Check that every ``p^sigma`` has single-signed coefficients.

    With ``reference_sign`` the expected sign of ``p^sigma`` is
    ``reference_sign * (-1)^{#negatives(sigma)}`` and Zero results are exempt.
    """
    k = p.k
    codes, first_pos, first_neg = sweep(p, jobs=jobs)
    counts = {tag.value: int(np.count_nonzero(codes == code)) for code, tag in _TAG_CODE.items()}
    mixed = np.flatnonzero(codes == 3)
    counterexample = None
    if len(mixed):
        mask = int(mixed[0])
        sigma = SignSequence(k, mask)
        sub = p.substitute_signs(sigma)
        pos_m, neg_m = int(first_pos[mask]), int(first_neg[mask])
        counterexample = {
            "sigma": str(sigma),
            "mask": mask,
            "positive": {"monomial": MultilinearPoly.monomial_text(pos_m) or "1", "coeff": str(sub.coefficient(pos_m))},
            "negative": {"monomial": MultilinearPoly.monomial_text(neg_m) or "1", "coeff": str(sub.coefficient(neg_m))},
        }

    sign_ok = None
    violation = None
    if reference_sign is not None:
        masks = np.arange(len(codes), dtype=np.int64)
        expected = np.where(_parity(masks) == 1, -reference_sign, reference_sign)
        observed = np.select([codes == 1, codes == 2], [1, -1], 0)
        bad = np.flatnonzero((codes != 0) & (observed != expected))
        sign_ok = not len(bad)
        if len(bad):
            mask = int(bad[0])
            violation = {
                "sigma": str(SignSequence(k, mask)),
                "mask": mask,
                "expected": int(expected[mask]),
                "pattern": _TAG_CODE[int(codes[mask])].value,
            }

    per_sigma = None
    if keep_per_sigma:
        per_sigma = {}
        for mask, code in enumerate(codes.tolist()):
            tag = _TAG_CODE[code]
            wit = (int(first_pos[mask]), int(first_neg[mask])) if tag is Pattern.MIXED else None
            per_sigma[mask] = SignPattern(tag, wit)

    return GoodnessReport(
        k=k,
        all_good=not len(mixed),
        sign_formula_holds=sign_ok,
        counts=counts,
        n_terms=len(p),
        counterexample=counterexample,
        sign_violation=violation,
        per_sigma=per_sigma,
    )


def verify_theorem(k: int, jobs: int = 1, keep_per_sigma: bool = False) -> GoodnessReport:
    """Goodness of ``p_k`` with sign ``(-1)^{k + #negatives}`` expected."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return goodness(p_k(k), reference_sign=(-1) ** k, jobs=jobs, keep_per_sigma=keep_per_sigma)


def verify_comb_good(k: int, M: IntMatrix2, jobs: int = 1, keep_per_sigma: bool = False) -> GoodnessReport:
    """Goodness of ``a f_k + b h_k + c t_k + d g_k``.

    The leading term is ``a (-4)^k x1 y1 ... xk yk``, so the reference sign is
    ``sign(a) (-1)^k``; no sign is predicted when ``a = 0``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    poly = trace_comb(compute_F(k), M)
    ref = None if M.a == 0 else (1 if M.a > 0 else -1) * (-1) ** k
    return goodness(poly, reference_sign=ref, jobs=jobs, keep_per_sigma=keep_per_sigma)


def numeric_oracle(k: int, exponents: Sequence[int]) -> int:
    """``tr(A^{m1} B^{n1} ... A^{mk} B^{nk})`` by integer matrix products."""
    if len(exponents) != 2 * k:
        raise ValueError(f"expected {2 * k} exponents, got {len(exponents)}")
    M = IntMatrix2.identity()
    for j in range(k):
        M = M @ power_A(int(exponents[2 * j])) @ power_B(int(exponents[2 * j + 1]))
    return M.trace()


@dataclass
class OracleReport:
    k: int
    seed: int
    trials: int
    agree: int
    mismatches: list[dict]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json_obj(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "trials": self.trials,
            "agree": self.agree,
            "mismatches": self.mismatches,
        }


def random_exponents(rng: random.Random, k: int, bound: int = 5) -> list[int]:
    choices = [v for v in range(-bound, bound + 1) if v]
    return [rng.choice(choices) for _ in range(2 * k)]


def oracle_trials(k: int, trials: int = 1000, seed: int = 0, bound: int = 5) -> OracleReport:
    """Compare the matrix-product oracle with evaluation of ``p_k``."""
    rng = random.Random(seed)
    points = [random_exponents(rng, k, bound) for _ in range(trials)]
    poly = p_k(k)
    values = poly.evaluate_many(points) if points else []
    mismatches = []
    for pt, val in zip(points, values):
        want = numeric_oracle(k, pt)
        if int(val) != want:
            mismatches.append({"point": pt, "oracle": str(want), "polynomial": str(int(val))})
    return OracleReport(k, seed, trials, trials - len(mismatches), mismatches)
