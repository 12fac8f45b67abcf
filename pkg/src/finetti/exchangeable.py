"""Exchangeable laws on A^n in their canonical histogram-weight form.

An exchangeable law is determined by the distribution of the histogram of the
n draws: within a histogram class the law is uniform.  Laws here store that
weight vector, indexed by the shared enumeration order of `type_list`, which
makes mixing, marginalisation, and restriction exact rational linear algebra.

Distributions over k-blocks (elements of A^k) are indexed by base-m encoding
with the most significant symbol first, i.e. in the order produced by
itertools.product(range(m), repeat=k).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .types_core import (
    Pmf,
    TypeVector,
    count_types,
    empirical_type,
    type_class_probability,
    type_class_size,
    type_index_map,
    type_list,
    type_to_pmf,
)

__all__ = [
    "ExchangeableLaw",
    "MixingMeasure",
    "all_strings",
    "conditional_given_type",
    "delta_type_law",
    "empirical_type_law",
    "from_mixing_measure",
    "iid_law",
    "law_from_json",
    "law_from_type_weights",
    "law_to_json",
    "marginal",
    "mixture_iid",
    "polya_urn_law",
    "power_pmf",
    "random_type_weight_law",
    "restrict_law",
    "string_index",
]


def all_strings(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All k-strings over 0..m-1 in index order."""
    if m < 1 or k < 1:
        raise ValueError(f"need m >= 1 and k >= 1, got m={m}, k={k}")
    return tuple(product(range(m), repeat=k))


def string_index(s: Sequence[int], m: int) -> int:
    idx = 0
    for a in s:
        if not 0 <= a < m:
            raise ValueError(f"symbol {a!r} outside alphabet of size {m}")
        idx = idx * m + a
    return idx


def power_pmf(q: Pmf, k: int) -> Pmf:
    """Law of k i.i.d. draws from q, as a pmf over A^k in index order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    m = len(q)
    one = Fraction(1) if q.exact else 1.0
    entries = []
    for s in all_strings(m, k):
        prob = one
        for a in s:
            prob = prob * q[a]
        entries.append(prob)
    return Pmf(tuple(entries), exact=q.exact)


@dataclass(frozen=True)
class ExchangeableLaw:
    """Exchangeable law on A^n, stored as its histogram weight vector.

    `type_weights[i]` is the probability of the i-th histogram in the shared
    enumeration order.  Zero-weight histograms keep their slot so that laws
    with the same (m, n) live in the same index space.
    """

    m: int
    n: int
    type_weights: Pmf

    def __post_init__(self) -> None:
        expected = count_types(self.m, self.n)
        if len(self.type_weights) != expected:
            raise ValueError(
                f"weight vector has {len(self.type_weights)} entries, "
                f"(m={self.m}, n={self.n}) has {expected} types"
            )

    @property
    def exact(self) -> bool:
        return self.type_weights.exact

    @property
    def types(self) -> tuple[TypeVector, ...]:
        return type_list(self.m, self.n)


@dataclass(frozen=True)
class MixingMeasure:
    """Finitely supported measure on the simplex: ((pmf, weight), ...)."""

    atoms: tuple[tuple[Pmf, object], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("mixing measure needs at least one atom")
        m = len(self.atoms[0][0])
        if any(len(q) != m for q, _ in self.atoms):
            raise ValueError("all atoms must share one alphabet")
        if any(w < 0 for _, w in self.atoms):
            raise ValueError("negative mixing weight")
        total = sum(w for _, w in self.atoms)
        exact = all(isinstance(w, (int, Fraction)) for _, w in self.atoms)
        if exact and total != 1:
            raise ValueError(f"mixing weights sum to {total}, not 1")
        if not exact and abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"mixing weights sum to {float(total)!r}")

    @property
    def m(self) -> int:
        return len(self.atoms[0][0])


def law_from_type_weights(m: int, n: int, weights) -> ExchangeableLaw:
    pmf = weights if isinstance(weights, Pmf) else Pmf(tuple(weights))
    return ExchangeableLaw(m, n, pmf)


def empirical_type_law(law: ExchangeableLaw) -> Pmf:
    """Distribution of the histogram of the n draws (the mixing weights)."""
    return law.type_weights


def conditional_given_type(t: TypeVector, prefix: Sequence[int]) -> Fraction:
    """P(first len(prefix) draws equal prefix | histogram of all n draws is t).

    Sampling without replacement from the multiset t: a falling-factorial
    product, exactly rational, zero when the prefix needs more of a symbol
    than t holds.
    """
    n = t.n
    if len(prefix) > n:
        raise ValueError(f"prefix of length {len(prefix)} exceeds n={n}")
    used = [0] * t.m
    prob = Fraction(1)
    for i, a in enumerate(prefix):
        if not 0 <= a < t.m:
            raise ValueError(f"symbol {a!r} outside alphabet of size {t.m}")
        avail = t.counts[a] - used[a]
        if avail <= 0:
            return Fraction(0)
        prob *= Fraction(avail, n - i)
        used[a] += 1
    return prob


def marginal(law: ExchangeableLaw, k: int) -> Pmf:
    """Law of the first k coordinates, as a pmf over A^k in index order."""
    if not 1 <= k <= law.n:
        raise ValueError(f"k must lie in 1..{law.n}, got {k}")
    zero = Fraction(0) if law.exact else 0.0
    entries = []
    weights = law.type_weights
    types = law.types
    for s in all_strings(law.m, k):
        acc = zero
        for t, w in zip(types, weights):
            if w:
                acc = acc + w * conditional_given_type(t, s)
        entries.append(acc)
    return Pmf(tuple(entries), exact=law.exact)


def mixture_iid(source, k: int) -> Pmf:
    """Mixture of i.i.d. k-block laws.

    `source` is a MixingMeasure, or an ExchangeableLaw whose histogram weights
    are read as a mixing measure over the empirical pmfs t/n.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if isinstance(source, ExchangeableLaw):
        atoms = [
            (type_to_pmf(t), w)
            for t, w in zip(source.types, source.type_weights)
            if w
        ]
        m = source.m
        exact = source.exact
    else:
        atoms = [(q, w) for q, w in source.atoms if w]
        m = source.m
        exact = all(q.exact for q, _ in atoms) and all(
            isinstance(w, (int, Fraction)) for _, w in atoms
        )
    zero = Fraction(0) if exact else 0.0
    entries = []
    for s in all_strings(m, k):
        acc = zero
        for q, w in atoms:
            prob = w
            for a in s:
                prob = prob * q[a]
            acc = acc + prob
        entries.append(acc)
    return Pmf(tuple(entries), exact=exact)


def from_mixing_measure(mix: MixingMeasure, n: int) -> ExchangeableLaw:
    """Exchangeable law of n i.i.d.-given-theta draws under the mixing measure."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    exact = all(q.exact for q, _ in mix.atoms) and all(
        isinstance(w, (int, Fraction)) for _, w in mix.atoms
    )
    zero = Fraction(0) if exact else 0.0
    weights = []
    for t in type_list(mix.m, n):
        acc = zero
        for q, w in mix.atoms:
            if w:
                acc = acc + w * type_class_probability(t, q)
        weights.append(acc)
    return ExchangeableLaw(mix.m, n, Pmf(tuple(weights), exact=exact))


def iid_law(q: Pmf, n: int) -> ExchangeableLaw:
    return from_mixing_measure(MixingMeasure(((q, Fraction(1)),)), n)


def delta_type_law(t: TypeVector) -> ExchangeableLaw:
    """Law that is uniform on one histogram class."""
    index = type_index_map(t.m, t.n)[t.counts]
    return ExchangeableLaw(t.m, t.n, Pmf.point_mass(count_types(t.m, t.n), index))


def _rising(a: int, c: int) -> int:
    out = 1
    for i in range(c):
        out *= a + i
    return out


def polya_urn_law(initial: Sequence[int], n: int) -> ExchangeableLaw:
    """Law of n draws from a Polya urn with the given initial composition.

    Closed form through rising factorials; initial counts must be >= 1.
    """
    initial = tuple(int(a) for a in initial)
    if len(initial) < 1 or any(a < 1 for a in initial):
        raise ValueError(f"initial composition must be positive integers, got {initial}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = len(initial)
    total = sum(initial)
    denom = _rising(total, n)
    weights = []
    for t in type_list(m, n):
        num = type_class_size(t)
        for a, c in zip(initial, t.counts):
            num *= _rising(a, c)
        weights.append(Fraction(num, denom))
    return ExchangeableLaw(m, n, Pmf(tuple(weights)))


def random_type_weight_law(m: int, n: int, seed: int, max_weight: int = 2**30) -> ExchangeableLaw:
    """Seeded random histogram weights: positive integers, then normalised."""
    if seed is None:
        raise ValueError("seed is required; the construction is randomized")
    rng = random.Random(seed)
    raw = [rng.randrange(1, max_weight) for _ in range(count_types(m, n))]
    return ExchangeableLaw(m, n, Pmf.from_weights(raw))


def restrict_law(law: ExchangeableLaw, n_sub: int) -> ExchangeableLaw:
    """Law of the first n_sub coordinates, again in histogram-weight form.

    The histogram of a prefix given the full histogram is multivariate
    hypergeometric, so the restricted weights are exact rational sums.
    """
    if not 1 <= n_sub <= law.n:
        raise ValueError(f"n_sub must lie in 1..{law.n}, got {n_sub}")
    if n_sub == law.n:
        return law
    drop = law.n - n_sub
    idx = type_index_map(law.m, n_sub)
    zero = Fraction(0) if law.exact else 0.0
    out = [zero] * count_types(law.m, n_sub)
    denom = Fraction(1, _binom(law.n, drop)) if law.exact else 1.0 / _binom(law.n, drop)
    for t, w in zip(law.types, law.type_weights):
        if not w:
            continue
        for removal in _bounded_compositions(drop, t.counts):
            ways = 1
            for c, r in zip(t.counts, removal):
                ways *= _binom(c, r)
            kept = tuple(c - r for c, r in zip(t.counts, removal))
            out[idx[kept]] = out[idx[kept]] + w * ways * denom
    return ExchangeableLaw(law.m, n_sub, Pmf(tuple(out), exact=law.exact))


def _binom(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


def _bounded_compositions(total: int, bounds: Sequence[int]):
    """Integer vectors 0 <= r <= bounds with sum(r) = total."""
    if len(bounds) == 1:
        if total <= bounds[0]:
            yield (total,)
        return
    for first in range(min(total, bounds[0]) + 1):
        for rest in _bounded_compositions(total - first, bounds[1:]):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# law files
# ---------------------------------------------------------------------------


def _parse_rational(value) -> Fraction:
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"rationals must be integers or strings like '3/4', got {value!r}")


def _format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)


def law_to_json(law: ExchangeableLaw) -> dict:
    """Serialisable form: nonzero histogram weights as 'p/q' strings."""
    if not law.exact:
        raise ValueError("only exact laws serialise to the rational law format")
    entries = [
        {"counts": list(t.counts), "w": _format_rational(w)}
        for t, w in zip(law.types, law.type_weights)
        if w
    ]
    return {"m": law.m, "n": law.n, "typeWeights": entries}


def law_from_json(obj, n: int | None = None) -> ExchangeableLaw:
    """Read a law file: either histogram weights or a mixing measure.

    A typeWeights file fixes (m, n) itself.  A mixing file needs n, from the
    file or from the caller; the caller wins only when the file has no n.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("law file must be a JSON object")
    if "typeWeights" in obj:
        m, file_n = int(obj["m"]), int(obj["n"])
        if n is not None and n != file_n:
            raise ValueError(f"law file has n={file_n}, caller asked for n={n}")
        weights = [Fraction(0)] * count_types(m, file_n)
        idx = type_index_map(m, file_n)
        for entry in obj["typeWeights"]:
            counts = tuple(int(c) for c in entry["counts"])
            if counts not in idx:
                raise ValueError(f"counts {counts} are not a histogram at (m={m}, n={file_n})")
            weights[idx[counts]] += _parse_rational(entry["w"])
        return ExchangeableLaw(m, file_n, Pmf(tuple(weights)))
    if "mixing" in obj:
        atoms = []
        for entry in obj["mixing"]:
            q = Pmf(tuple(_parse_rational(v) for v in entry["pmf"]))
            atoms.append((q, _parse_rational(entry["w"])))
        mix = MixingMeasure(tuple(atoms))
        use_n = int(obj["n"]) if "n" in obj else n
        if use_n is None:
            raise ValueError("mixing law file needs n (in the file or from the caller)")
        return from_mixing_measure(mix, use_n)
    raise ValueError("law file needs a 'typeWeights' or 'mixing' key")
