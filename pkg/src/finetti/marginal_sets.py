"""Block laws whose averaged coordinate marginals are pinned to a target pmf.

For a pmf Q on A and block length k, the constraint set holds every
distribution W on A^k whose k coordinate marginals average to Q.  Membership
is a system of exact linear equations: writing occ[b][a] for the number of
times symbol a occurs in block b,

    sum_b W(b) * occ[b][a] = k * Q(a)   for every a.

The module enumerates the lattice points of this polytope among l-block
histograms, maximises relative entropy over it by exact vertex search, builds
low-deviation lattice members by seeded random permutation, and evaluates the
conditional mean divergence and tail bounds used by the finite mixture
approximation argument.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .exactlog import (
    LogCombination,
    entropy_combination,
    relative_entropy_combination,
)
from .exchangeable import all_strings, power_pmf
from .info_measures import entropy, l1_distance, max_abs_deviation, relative_entropy
from .types_core import (
    CapacityError,
    Pmf,
    TypeVector,
    count_types,
    resolve_cap,
    type_class_size,
    type_to_pmf,
)

__all__ = [
    "ConditionalMeanResult",
    "ExhaustedTriesError",
    "MarginalAverageSet",
    "MaxDivergenceResult",
    "PermutedBlockResult",
    "TailBoundResult",
    "average_coordinate_marginal",
    "conditional_mean_divergence",
    "divergence_decomposition",
    "enumerate_E_k_types",
    "in_E_k",
    "lattice_argmin_uniform_divergence",
    "lemma1_constant",
    "lemma1_construct",
    "max_divergence_over_E_k",
    "partition_tail_bound",
]

# Exact vertex search enumerates column subsets; past 64 cells the subset
# count stops being desk scale.
MAX_VERTEX_CELLS = 64

_SLACK = 1e-12


class ExhaustedTriesError(RuntimeError):
    """The randomized construction ran out of permutations and fallbacks."""


@lru_cache(maxsize=None)
def _occurrence_matrix(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    """occ[b][a]: multiplicity of symbol a in the b-th block of A^k."""
    rows = []
    for s in all_strings(m, k):
        row = [0] * m
        for a in s:
            row[a] += 1
        rows.append(tuple(row))
    return tuple(rows)


def _infer_k(w_size: int, m: int) -> int:
    k = 1
    size = m
    while size < w_size:
        size *= m
        k += 1
    if size != w_size:
        raise ValueError(f"{w_size} cells is not a power of alphabet size {m}")
    return k


def _as_block_pmf(w) -> Pmf:
    if isinstance(w, Pmf):
        return w
    if isinstance(w, TypeVector):
        return type_to_pmf(w)
    return Pmf(tuple(w))


def _as_symbol_pmf(q) -> Pmf:
    if isinstance(q, Pmf):
        return q
    if isinstance(q, TypeVector):
        return type_to_pmf(q)
    return Pmf(tuple(q))


def average_coordinate_marginal(w, m: int) -> Pmf:
    """Average of the k coordinate marginals of a block pmf over A^k."""
    w = _as_block_pmf(w)
    k = _infer_k(len(w), m)
    occ = _occurrence_matrix(m, k)
    zero = Fraction(0) if w.exact else 0.0
    sums = [zero] * m
    for prob, row in zip(w.probs, occ):
        if prob:
            for a in range(m):
                if row[a]:
                    sums[a] = sums[a] + prob * row[a]
    if w.exact:
        return Pmf(tuple(s / k for s in sums))
    return Pmf(tuple(s / k for s in sums), exact=False)


def in_E_k(w, q, tol: float = _SLACK) -> bool:
    """Whether the averaged coordinate marginals of w equal q.

    Exact comparison when both sides are exact, entrywise tolerance otherwise.
    """
    q = _as_symbol_pmf(q)
    w = _as_block_pmf(w)
    avg = average_coordinate_marginal(w, len(q))
    if w.exact and q.exact:
        return avg.probs == q.probs
    return all(abs(float(x) - float(y)) <= tol for x, y in zip(avg, q))


@dataclass(frozen=True)
class MarginalAverageSet:
    """Descriptor of the set of block laws averaging to q on A^k."""

    q: Pmf
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    @property
    def m(self) -> int:
        return len(self.q)

    def contains(self, w) -> bool:
        return in_E_k(w, self.q)


# ---------------------------------------------------------------------------
# lattice enumeration
# ---------------------------------------------------------------------------


def enumerate_E_k_types(q, k: int, ell: int, cap: int | None = None) -> Iterator[TypeVector]:
    """l-block histograms over A^k whose averaged marginals equal q.

    Yields exactly the members of the full histogram enumeration that satisfy
    the marginal constraint, in the same order, but walks the constraint
    lattice directly so large feasible sets stay cheap.  q must be an n-type
    (or a pmf with k*l*q(a) integral); otherwise the set is empty.
    """
    q = _as_symbol_pmf(q)
    m = len(q)
    if k < 1 or ell < 1:
        raise ValueError(f"need k >= 1 and l >= 1, got k={k}, l={ell}")
    total = count_types(m**k, ell)
    limit = resolve_cap(cap)
    if total > limit:
        raise CapacityError(
            f"{total} block histograms at (cells={m ** k}, l={ell}) exceeds cap {limit}"
        )
    targets = []
    for a in range(m):
        target = Fraction(q[a]) * k * ell if q.exact else q[a] * k * ell
        if q.exact:
            if target.denominator != 1:
                return
            targets.append(int(target))
        else:
            rounded = round(target)
            if abs(target - rounded) > 1e-9:
                return
            targets.append(int(rounded))
    occ = _occurrence_matrix(m, k)
    cells = len(occ)
    # suffix_max[a][b]: largest occ[b'][a] over b' >= b, for pruning
    suffix_max = [[0] * (cells + 1) for _ in range(m)]
    for a in range(m):
        for b in range(cells - 1, -1, -1):
            suffix_max[a][b] = max(occ[b][a], suffix_max[a][b + 1])

    counts = [0] * cells

    def walk(b: int, remaining: int, residual: list[int]) -> Iterator[TypeVector]:
        if b == cells - 1:
            counts[b] = remaining
            if all(occ[b][a] * remaining == residual[a] for a in range(m)):
                yield TypeVector(tuple(counts))
            return
        upper = remaining
        for a in range(m):
            if occ[b][a]:
                upper = min(upper, residual[a] // occ[b][a])
        for c in range(upper + 1):
            left = remaining - c
            new_residual = [residual[a] - c * occ[b][a] for a in range(m)]
            if any(new_residual[a] > left * suffix_max[a][b + 1] for a in range(m)):
                continue
            counts[b] = c
            yield from walk(b + 1, left, new_residual)

    yield from walk(0, ell, list(targets))


# ---------------------------------------------------------------------------
# divergence geometry
# ---------------------------------------------------------------------------


def divergence_decomposition(w, q, k: int | None = None) -> tuple[float, float, float]:
    """(D(W||U), D(W||Q^k), D(Q^k||U)) for a member W of the constraint set.

    The first equals the sum of the other two on the constraint set; with
    exact inputs that identity and D(W||Q^k) = k*H(Q) - H(W) are certified in
    exact arithmetic before the float triple is returned.  Raises ValueError
    when W is not a member.
    """
    q = _as_symbol_pmf(q)
    w = _as_block_pmf(w)
    m = len(q)
    inferred = _infer_k(len(w), m)
    if k is not None and k != inferred:
        raise ValueError(f"w lives on A^{inferred}, caller says k={k}")
    k = inferred
    if not in_E_k(w, q):
        raise ValueError("w is not in the constraint set of q")
    uniform = Pmf.uniform(len(w), exact=w.exact and q.exact)
    qk = power_pmf(q, k)
    d_wu = relative_entropy(w, uniform)
    d_wq = relative_entropy(w, qk)
    d_qu = relative_entropy(qk, uniform)
    if w.exact and q.exact:
        lhs = relative_entropy_combination(w.probs, uniform.probs)
        rhs = relative_entropy_combination(w.probs, qk.probs)
        rhs.add_combination(relative_entropy_combination(qk.probs, uniform.probs))
        if not lhs.equals(rhs):
            raise AssertionError("exact Pythagorean identity failed; not reachable for members")
        # consequence: D(W||Q^k) = k*H(Q) - H(W)
        combo = LogCombination()
        combo.add_combination(entropy_combination(q.probs), k)
        combo.add_combination(entropy_combination(w.probs), -1)
        if not relative_entropy_combination(w.probs, qk.probs).equals(combo):
            raise AssertionError("entropy form of the member divergence failed")
    else:
        if abs(d_wu - (d_wq + d_qu)) > 1e-10:
            raise AssertionError(
                f"float Pythagorean identity off by {abs(d_wu - (d_wq + d_qu))!r}"
            )
    return d_wu, d_wq, d_qu


def lattice_argmin_uniform_divergence(
    q, k: int, ell: int, cap: int | None = None
) -> tuple[TypeVector, bool]:
    """Member minimising D(. || uniform), with a uniqueness flag, exactly.

    On the constraint set D(W || U) = k*log(m) - H(W), and entropies of
    l-block histograms compare exactly through the integer keys
    prod_b counts[b]^counts[b], so no floats are involved in the ordering.
    When Q^k itself is a lattice point it is the unique minimiser.
    """
    best_key: int | None = None
    best_member: TypeVector | None = None
    unique = True
    for member in enumerate_E_k_types(q, k, ell, cap=cap):
        key = 1
        for c in member.counts:
            if c:
                key *= c**c
        if best_key is None or key < best_key:
            best_key = key
            best_member = member
            unique = True
        elif key == best_key:
            unique = False
    if best_member is None:
        raise ValueError("constraint set has no lattice members at this l")
    return best_member, unique


@dataclass(frozen=True)
class MaxDivergenceResult:
    value: float
    witness: Pmf
    candidates: int
    mode: str


def _solve_columns(
    cols: Sequence[tuple[Fraction, ...]], target: Sequence[Fraction]
) -> tuple[Fraction, ...] | None:
    """Unique exact solution of cols * x = target, or None.

    None when the columns are dependent or the system is inconsistent.
    """
    rows = len(target)
    s = len(cols)
    aug = [[cols[j][i] for j in range(s)] + [target[i]] for i in range(rows)]
    pivot_rows: list[int] = []
    row = 0
    for col in range(s):
        pivot = next((r for r in range(row, rows) if aug[r][col] != 0), None)
        if pivot is None:
            return None  # dependent columns
        aug[row], aug[pivot] = aug[pivot], aug[row]
        inv = aug[row][col]
        aug[row] = [v / inv for v in aug[row]]
        for r in range(rows):
            if r != row and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[row])]
        pivot_rows.append(row)
        row += 1
    for r in range(row, rows):
        if aug[r][s] != 0:
            return None  # inconsistent
    return tuple(aug[i][s] for i in range(s))


def max_divergence_over_E_k(
    q,
    k: int,
    mode: str = "exact",
    ell: int | None = None,
    cap: int | None = None,
) -> MaxDivergenceResult:
    """Maximum of D(W || Q^k) over the constraint set of q.

    Exact mode maximises over the polytope itself: on the set the divergence
    is k*H(Q) - H(W), entropy is concave, so the maximum sits at a vertex, and
    vertices are basic solutions of the occurrence system.  Grid mode takes
    the maximum over the l-block lattice members instead.  Every member is
    supported inside supp(Q^k), which keeps the value finite and at most
    k * log(n) for an n-type q.
    """
    q = _as_symbol_pmf(q)
    m = len(q)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    qk = power_pmf(q, k)
    if mode == "grid":
        if ell is None:
            raise ValueError("grid mode needs l")
        best: tuple[float, Pmf] | None = None
        candidates = 0
        for member in enumerate_E_k_types(q, k, ell, cap=cap):
            candidates += 1
            w = type_to_pmf(member)
            d = relative_entropy(w, qk)
            if best is None or d > best[0]:
                best = (d, w)
        if best is None:
            raise ValueError("constraint set has no lattice members at this l")
        return MaxDivergenceResult(best[0], best[1], candidates, "grid")
    if mode != "exact":
        raise ValueError(f"mode must be 'exact' or 'grid', got {mode!r}")
    if not q.exact:
        raise ValueError("exact mode needs an exact pmf")
    cells = m**k
    if cells > MAX_VERTEX_CELLS:
        raise CapacityError(f"{cells} cells exceeds vertex search limit {MAX_VERTEX_CELLS}")
    occ = _occurrence_matrix(m, k)
    active_rows = [a for a in range(m) if q[a] > 0]
    # support argument: any member vanishes on blocks using a zero-mass symbol
    active_cols = [b for b in range(cells) if all(occ[b][a] == 0 or q[a] > 0 for a in range(m))]
    target = [Fraction(q[a]) * k for a in active_rows]
    columns = {b: tuple(Fraction(occ[b][a]) for a in active_rows) for b in active_cols}
    seen: set[tuple[Fraction, ...]] = set()
    best_vertex: Pmf | None = None
    best_h = math.inf
    candidates = 0
    for size in range(1, len(active_rows) + 1):
        for subset in combinations(active_cols, size):
            x = _solve_columns([columns[b] for b in subset], target)
            if x is None or any(v < 0 for v in x):
                continue
            full = [Fraction(0)] * cells
            for b, v in zip(subset, x):
                full[b] = v
            key = tuple(full)
            if key in seen:
                continue
            seen.add(key)
            candidates += 1
            vertex = Pmf(key)
            h = entropy(vertex)
            if h < best_h - _SLACK or best_vertex is None:
                best_h = h
                best_vertex = vertex
    if best_vertex is None:
        raise ValueError("constraint polytope is empty; q must be a valid pmf")
    value = k * entropy(q) - best_h
    return MaxDivergenceResult(value, best_vertex, candidates, "exact")


# ---------------------------------------------------------------------------
# randomized low-deviation construction
# ---------------------------------------------------------------------------


def lemma1_constant(ell: int, k: int) -> float:
    """Deviation budget M = sqrt(2/l + 4k/l + 2*sqrt(k/l)) for l blocks of k."""
    if not 1 <= k < ell:
        raise ValueError(f"need l > k >= 1, got l={ell}, k={k}")
    return math.sqrt(2.0 / ell + 4.0 * k / ell + 2.0 * math.sqrt(k / ell))


@dataclass(frozen=True)
class PermutedBlockResult:
    """Outcome of the seeded permutation construction."""

    block_type: TypeVector
    pmf: Pmf
    deviation: float
    l1_deviation: float
    bound: float
    tries: int
    fallback: bool
    entropy_gap: float
    entropy_gap_bound: float
    certified_regime: bool
    entropy_within_bound: bool


def lemma1_construct(
    q: TypeVector,
    k: int,
    ell: int,
    seed: int,
    max_tries: int = 1000,
    cap: int | None = None,
) -> PermutedBlockResult:
    """Seeded search for a lattice member close to Q^k in max-abs deviation.

    Lays out a string of histogram q, Fisher-Yates shuffles it with
    random.Random(seed), cuts it into l blocks of k, and keeps the first
    block histogram within deviation M of Q^k.  After max_tries shuffles it
    falls back to exhaustive lattice search; if even that has no member
    within M (not possible for valid inputs, but checked), raises
    ExhaustedTriesError.

    Both the max-abs and the L1 deviation of the accepted member are
    recorded.  The entropy gap |H(W) - H(Q^k)| is compared against
    -M*log(M/m^k); that comparison is a guarantee only in the certified
    regime 2 <= k <= sqrt(l)/10 (where M < 1/2), and is reported as data
    otherwise.
    """
    if not isinstance(q, TypeVector):
        raise ValueError("q must be an n-type (a TypeVector)")
    if k < 1 or ell < 1 or k * ell != q.n:
        raise ValueError(f"need k*l = n, got k={k}, l={ell}, n={q.n}")
    if seed is None:
        raise ValueError("seed is required; the construction is randomized")
    if max_tries < 1:
        raise ValueError(f"max_tries must be >= 1, got {max_tries}")
    m = q.m
    bound = lemma1_constant(ell, k)
    qk = power_pmf(type_to_pmf(q), k)
    base = []
    for a, c in enumerate(q.counts):
        base.extend([a] * c)
    rng = random.Random(seed)
    cells = m**k

    accepted: tuple[int, ...] | None = None
    tries = 0
    fallback = False
    for _ in range(max_tries):
        tries += 1
        rng.shuffle(base)
        counts = [0] * cells
        for start in range(0, q.n, k):
            idx = 0
            for a in base[start : start + k]:
                idx = idx * m + a
            counts[idx] += 1
        dev = max_abs_deviation(tuple(Fraction(c, ell) for c in counts), qk)
        if dev <= bound:
            accepted = tuple(counts)
            break
    if accepted is None:
        fallback = True
        best: tuple[float, tuple[int, ...]] | None = None
        for member in enumerate_E_k_types(q, k, ell, cap=cap):
            dev = max_abs_deviation(type_to_pmf(member), qk)
            if best is None or dev < best[0]:
                best = (dev, member.counts)
        if best is None or best[0] > bound:
            raise ExhaustedTriesError(
                f"no member within deviation {bound} after {max_tries} shuffles"
            )
        accepted = best[1]
    block_type = TypeVector(accepted)
    pmf = type_to_pmf(block_type)
    deviation = max_abs_deviation(pmf, qk)
    l1_dev = l1_distance(pmf, qk)
    gap = abs(entropy(pmf) - entropy(qk))
    gap_bound = -bound * math.log(bound / cells)
    certified = k >= 2 and 100 * k * k <= ell and bound < 0.5
    return PermutedBlockResult(
        block_type=block_type,
        pmf=pmf,
        deviation=deviation,
        l1_deviation=l1_dev,
        bound=bound,
        tries=tries,
        fallback=fallback,
        entropy_gap=gap,
        entropy_gap_bound=gap_bound,
        certified_regime=certified,
        entropy_within_bound=gap <= gap_bound + _SLACK,
    )


# ---------------------------------------------------------------------------
# conditional mean divergence and tail bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionalMeanResult:
    value: float
    members: int


def conditional_mean_divergence(
    q, k: int, ell: int, cap: int | None = None
) -> ConditionalMeanResult:
    """E[D(What || Q^k)] over l-block histograms conditioned on the constraint set.

    What is the histogram of l i.i.d. uniform blocks; conditioning on the
    constraint set weights each member by its class size, exactly.  The
    weights are exact rationals; only the final average is a float.
    """
    q = _as_symbol_pmf(q)
    qk = power_pmf(q, k)
    total = 0
    rows: list[tuple[int, float]] = []
    for member in enumerate_E_k_types(q, k, ell, cap=cap):
        size = type_class_size(member)
        total += size
        rows.append((size, relative_entropy(type_to_pmf(member), qk)))
    if not rows:
        raise ValueError("constraint set has no lattice members at this l")
    value = math.fsum(float(Fraction(size, total)) * d for size, d in rows)
    return ConditionalMeanResult(value=value, members=len(rows))


@dataclass(frozen=True)
class TailBoundResult:
    log_bound: float
    bound: float
    exact_probability: float | None
    exact_within_bound: bool | None
    deviation_constant: float
    entropy_margin_certified: bool


def partition_tail_bound(
    q,
    k: int,
    ell: int,
    delta: float,
    cap: int | None = None,
    exact: bool | None = None,
) -> TailBoundResult:
    """(l+1)^(2*m^k) * e^(-l*delta) tail bound, with an exact check when cheap.

    Covers the conditional probability that an l-block histogram in the
    constraint set has D(W||U) exceeding D(Q^k||U) + 2*delta.  When the
    lattice fits the cap (or exact=True) the exact conditional probability is
    computed by enumeration and asserted to sit below the bound.  Also
    reports whether the entropy margin -M*log(M/m^k) of the permutation
    construction fits inside delta, which certifies that the well-placed
    member lands in the low-divergence cell of the partition; M >= 1/2 leaves
    that certification unavailable.
    """
    q = _as_symbol_pmf(q)
    m = len(q)
    if k < 1 or ell < 1:
        raise ValueError(f"need k >= 1 and l >= 1, got k={k}, l={ell}")
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    cells = m**k
    log_bound = 2 * cells * math.log(ell + 1) - ell * delta
    bound = math.exp(log_bound) if log_bound <= 700 else math.inf

    if ell > k:
        big_m = lemma1_constant(ell, k)
        certified = big_m < 0.5 and -big_m * math.log(big_m / cells) <= delta + _SLACK
    else:
        big_m = math.inf
        certified = False

    want_exact = exact
    if want_exact is None:
        want_exact = count_types(cells, ell) <= resolve_cap(cap)
    exact_prob: float | None = None
    within: bool | None = None
    if want_exact:
        qk = power_pmf(q, k)
        d_star = relative_entropy(qk, Pmf.uniform(cells, exact=q.exact))
        threshold = d_star + 2 * delta
        total = 0
        heavy = 0
        uniform = Pmf.uniform(cells, exact=q.exact)
        for member in enumerate_E_k_types(q, k, ell, cap=cap):
            size = type_class_size(member)
            total += size
            if relative_entropy(type_to_pmf(member), uniform) > threshold:
                heavy += size
        if total == 0:
            raise ValueError("constraint set has no lattice members at this l")
        exact_prob = float(Fraction(heavy, total))
        within = exact_prob <= bound + _SLACK
        if not within:
            raise AssertionError(
                f"exact tail {exact_prob} exceeds analytic bound {bound}; unreachable"
            )
    return TailBoundResult(
        log_bound=log_bound,
        bound=bound,
        exact_probability=exact_prob,
        exact_within_bound=within,
        deviation_constant=big_m,
        entropy_margin_certified=certified,
    )
