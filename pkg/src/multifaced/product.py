"""The symmetric universal product of functionals from a weight family.

The product of factor functionals is evaluated through the cumulant route:
the moment of a tagged word equals the weighted sum, over partitions whose
blocks stay inside one factor, of the family weight of the colored partition
times the product of the factor cumulants of the block subwords.  Blocks
mixing factors contribute zero (cumulants of a direct sum vanish on mixed
words), so only factor-pure partitions are enumerated.

Coefficient extraction follows the linearization construction: factors carry
the all-ones functional scaled by a formal nilpotent marker, and the product
moment's coefficient on the product of all markers is the highest
coefficient of the block pattern.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Sequence

from .classes import ClassId, member
from .classify import BudgetExceeded
from .partitions import OrderedPartition, Partition, meet, set_partitions
from .cumulants import (
    FunctionalTable,
    Letter,
    Word,
    cumulant,
    random_table,
    standard_generators,
    unit_extended_table,
)
from .weights import EPS, WeightFamily, is_singleton_inductive

# A tagged letter is (factor index, face, name); factor indices are 1-based.
TaggedLetter = tuple[int, str, str]
TaggedWord = tuple[TaggedLetter, ...]


# -- formal nilpotent markers ------------------------------------------------------


class MultilinearPoly:
    """Polynomial in commuting markers t_1..t_k, truncated to multidegree <= 1.

    Terms are keyed by frozen marker sets; products with a repeated marker
    are dropped, which realizes the mixed partial derivative at zero.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[frozenset, complex] | None = None):
        self.terms = terms or {}

    @classmethod
    def marker(cls, k: int, scale: complex = 1.0) -> "MultilinearPoly":
        return cls({frozenset((k,)): complex(scale)})

    @classmethod
    def const(cls, c: complex) -> "MultilinearPoly":
        return cls({frozenset(): complex(c)} if c != 0 else {})

    def coefficient(self, markers: Iterable[int]) -> complex:
        return self.terms.get(frozenset(markers), complex(0))

    def _as_poly(self, other) -> "MultilinearPoly":
        if isinstance(other, MultilinearPoly):
            return other
        return MultilinearPoly.const(other)

    def __add__(self, other):
        other = self._as_poly(other)
        out = dict(self.terms)
        for key, v in other.terms.items():
            out[key] = out.get(key, 0) + v
        return MultilinearPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._as_poly(other))

    def __rsub__(self, other):
        return self._as_poly(other) + (-self)

    def __neg__(self):
        return MultilinearPoly({k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        other = self._as_poly(other)
        out: dict[frozenset, complex] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                if k1 & k2:
                    continue  # repeated marker: truncated away
                key = k1 | k2
                out[key] = out.get(key, 0) + v1 * v2
        return MultilinearPoly(out)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        items = sorted(self.terms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return "Poly(" + " + ".join(f"{v:.3g}*t{sorted(k)}" for k, v in items) + ")"


# -- block structures ---------------------------------------------------------------


class BlockStructure:
    """Factor indices and faces per tensor position: b in [k]^n, f a word."""

    def __init__(self, b: Sequence[int], f: str):
        if len(b) != len(f):
            raise ValueError("factor tuple and face word must have equal length")
        self.b = tuple(b)
        self.f = f

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def k(self) -> int:
        return max(self.b, default=0)

    def beta(self, kappa: int) -> tuple[int, ...]:
        return tuple(i + 1 for i, v in enumerate(self.b) if v == kappa)

    def factor_partition(self) -> Partition:
        """The maximal adapted partition: positions grouped by factor."""
        groups: dict[int, list[int]] = {}
        for i, v in enumerate(self.b, start=1):
            groups.setdefault(v, []).append(i)
        return Partition(self.f, list(groups.values()))

    def adapted(self, p: Partition) -> bool:
        """Blocks inside one factor, and equal adjacent (factor, face) pairs
        forced into one block."""
        if p.word != self.f:
            return False
        for block in p.blocks:
            if len({self.b[leg - 1] for leg in block}) != 1:
                return False
        idx = p._block_index
        for i in range(1, self.n):
            if self.b[i - 1] == self.b[i] and self.f[i - 1] == self.f[i] and idx[i] != idx[i + 1]:
                return False
        return True

    def __repr__(self) -> str:
        return f"BlockStructure({''.join(map(str, self.b))} x {self.f})"


def tagged_word_structure(word: TaggedWord) -> BlockStructure:
    return BlockStructure([t[0] for t in word], "".join(t[1] for t in word))


# -- the product evaluator ------------------------------------------------------------


_factor_pure_store: dict[tuple[int, ...], tuple] = {}


def _factor_pure_partitions(b: tuple[int, ...]):
    """All set partitions of [n] whose blocks lie inside one factor, as block
    tuples in canonical order.  Cached per factor pattern."""
    got = _factor_pure_store.get(b)
    if got is not None:
        return got
    groups: dict[int, list[int]] = {}
    for i, v in enumerate(b, start=1):
        groups.setdefault(v, []).append(i)
    position_groups = list(groups.values())
    per_group = [set_partitions(len(g)) for g in position_groups]
    out = []
    for combo in itertools.product(*per_group):
        blocks: list[tuple[int, ...]] = []
        for legs, sub in zip(position_groups, combo):
            blocks.extend(tuple(legs[i - 1] for i in sb) for sb in sub)
        blocks.sort(key=lambda blk: blk[0])
        out.append(tuple(blocks))
    result = tuple(out)
    _factor_pure_store[b] = result
    return result


class Product:
    """Evaluator for the product of factor functionals under one family.

    Factor generator sets must be pairwise disjoint; cumulants are memoized
    per factor across moment queries.
    """

    def __init__(self, family: WeightFamily, factors: Sequence[FunctionalTable]):
        self.family = family
        self.factors = tuple(factors)
        seen: set[Letter] = set()
        for t in self.factors:
            dup = seen & set(t.generators)
            if dup:
                raise ValueError(f"factor generator sets overlap: {sorted(dup)}")
            seen.update(t.generators)
        self._owner = {g: i + 1 for i, t in enumerate(self.factors) for g in t.generators}
        self._cum_cache: list[dict[Word, complex]] = [dict() for _ in self.factors]

    def tag(self, word: Word) -> TaggedWord:
        return tuple((self._owner[g], g[0], g[1]) for g in word)

    def moment(self, word: TaggedWord):
        """The product moment of a tagged word."""
        n = len(word)
        if n == 0:
            return complex(1)
        factors_used = {t[0] for t in word}
        letters = tuple((t[1], t[2]) for t in word)
        if len(factors_used) == 1:
            # Restriction property: single-factor words are factor moments.
            kappa = next(iter(factors_used))
            return self.factors[kappa - 1].value(letters)
        faces = "".join(t[1] for t in word)
        b = tuple(t[0] for t in word)
        total = 0
        weight = self.family.evaluate_flat
        for blocks in _factor_pure_partitions(b):
            a = weight(faces, blocks)
            if a == 0:
                continue
            term = a
            for block in blocks:
                kappa = b[block[0] - 1]
                sub = tuple(letters[i - 1] for i in block)
                term = term * self._cumulant(kappa, sub)
                if isinstance(term, complex) and term == 0:
                    break
            total = term + total
        return total

    def moment_explained(self, word: TaggedWord):
        """The moment together with the per-partition expansion."""
        faces = "".join(t[1] for t in word)
        b = tuple(t[0] for t in word)
        letters = tuple((t[1], t[2]) for t in word)
        expansion = []
        total = 0
        for blocks in _factor_pure_partitions(b):
            p = Partition._unsafe(faces, blocks)
            a = self.family.evaluate_flat(faces, blocks)
            term = a
            for block in blocks:
                kappa = b[block[0] - 1]
                term = term * self._cumulant(kappa, tuple(letters[i - 1] for i in block))
            total = term + total
            expansion.append({"partition": str(p), "weight": a, "contribution": term})
        return total, expansion

    def _cumulant(self, kappa: int, word: Word):
        return cumulant(self.family, self.factors[kappa - 1], word, self._cum_cache[kappa - 1])


def product_moment(family: WeightFamily, factors: Sequence[FunctionalTable], word: TaggedWord):
    return Product(family, factors).moment(word)


def product_table(family: WeightFamily, factors: Sequence[FunctionalTable], degree_bound: int) -> FunctionalTable:
    """The product functional as a dense table over the union generator set."""
    prod = Product(family, factors)
    generators = tuple(g for t in factors for g in t.generators)
    values: dict[Word, complex] = {}
    for n in range(1, degree_bound + 1):
        for word in itertools.product(generators, repeat=n):
            values[word] = prod.moment(prod.tag(word))
    return FunctionalTable(generators, degree_bound, values=values)


# -- verification checks ---------------------------------------------------------------


def well_definedness_check(
    family: WeightFamily,
    factors: Sequence[FunctionalTable],
    word: TaggedWord,
    i: int,
    eps: float = EPS,
) -> dict:
    """Merge adjacent same-factor same-face letters and compare moments.

    Positions i, i+1 (1-based) must carry one factor and one face; the merged
    letter's moments expand it back, so the two evaluations must agree for
    admissible families.
    """
    n = len(word)
    if not 1 <= i < n:
        raise ValueError(f"position {i} out of range")
    f1, f2 = word[i - 1], word[i]
    if f1[0] != f2[0]:
        raise ValueError("positions must carry the same factor")
    if f1[1] != f2[1]:
        raise ValueError("positions must carry the same face")
    kappa, face = f1[0], f1[1]
    merged: Letter = (face, f"({f1[2]}*{f2[2]})")
    from .cumulants import merged_letter_table

    ext = list(factors)
    ext[kappa - 1] = merged_letter_table(factors[kappa - 1], merged, ((f1[1], f1[2]), (f2[1], f2[2])))
    lhs = Product(family, factors).moment(word)
    merged_word = word[: i - 1] + ((kappa, face, merged[1]),) + word[i + 1 :]
    rhs = Product(family, ext).moment(merged_word)
    return {"lhs": lhs, "rhs": rhs, "diff": abs(lhs - rhs), "ok": abs(lhs - rhs) <= eps}


def associativity_symmetry_check(
    family: WeightFamily,
    t1: FunctionalTable,
    t2: FunctionalTable,
    t3: FunctionalTable,
    max_len: int,
    eps: float = EPS,
) -> dict:
    """Compare both binary bracketings with the flat three-factor formula and
    check invariance under factor swaps, on every tagged word up to max_len."""
    flat = Product(family, (t1, t2, t3))
    left = Product(family, (product_table(family, (t1, t2), max_len), t3))
    right = Product(family, (t1, product_table(family, (t2, t3), max_len)))
    swapped = Product(family, (t2, t1, t3))
    generators = tuple(t1.generators + t2.generators + t3.generators)
    worst_assoc = 0.0
    worst_sym = 0.0
    for n in range(1, max_len + 1):
        for word in itertools.product(generators, repeat=n):
            v = flat.moment(flat.tag(word))
            worst_assoc = max(
                worst_assoc,
                abs(v - left.moment(left.tag(word))),
                abs(v - right.moment(right.tag(word))),
            )
            worst_sym = max(worst_sym, abs(v - swapped.moment(swapped.tag(word))))
    return {
        "worst_associativity": worst_assoc,
        "worst_symmetry": worst_sym,
        "ok": worst_assoc <= eps and worst_sym <= eps,
    }


# -- coefficient extraction --------------------------------------------------------------


def _all_ones_marker_table(kappa: int, generators: Sequence[Letter], degree: int) -> FunctionalTable:
    scaled = MultilinearPoly.marker(kappa)
    return FunctionalTable(generators, degree, fn=lambda word: scaled)


def extract_highest_coefficient(family: WeightFamily, p, order: Sequence[int] | None = None):
    """Recover the weight of a partition from the product engine alone.

    Builds the block structure of the (ordered) partition, gives every factor
    the all-ones functional scaled by a fresh nilpotent marker, and reads off
    the coefficient of the product of all markers in the product moment.
    Accepts a Partition (canonical block order) or an OrderedPartition.
    """
    if isinstance(p, OrderedPartition):
        p, order = p.partition, p.order
    if order is None:
        order = tuple(range(p.block_count))
    if p.block_count == 0:
        return complex(1)
    rank = {bidx: r + 1 for r, bidx in enumerate(order)}
    b = tuple(rank[p._block_index[leg]] for leg in range(1, p.n + 1))
    k = p.block_count
    generators = [[] for _ in range(k)]
    word: list[TaggedLetter] = []
    for leg in range(1, p.n + 1):
        g: Letter = (p.word[leg - 1], f"g{leg}")
        generators[b[leg - 1] - 1].append(g)
        word.append((b[leg - 1], g[0], g[1]))
    factors = [_all_ones_marker_table(kappa + 1, gens, p.n) for kappa, gens in enumerate(generators)]
    value = Product(family, factors).moment(tuple(word))
    if not isinstance(value, MultilinearPoly):
        value = MultilinearPoly.const(value)
    return value.coefficient(range(1, k + 1))


def extract_full_coefficient(family: WeightFamily, s: BlockStructure, p: Partition):
    """The coefficient of one adapted partition in the product expansion.

    Realizes the delta-functional construction: factor kappa's table is 1 on
    exactly the ordered block subwords of p inside factor kappa and 0 on
    every other word, so the product moment collapses to the coefficient.
    """
    if not s.adapted(p):
        raise ValueError(f"{p} is not adapted to {s}")
    k = s.k
    letters: list[Letter] = [(s.f[i], f"g{i + 1}") for i in range(s.n)]
    accepted: list[set[Word]] = [set() for _ in range(k)]
    for block in p.blocks:
        kappa = s.b[block[0] - 1]
        accepted[kappa - 1].add(tuple(letters[leg - 1] for leg in block))
    factors = []
    for kappa in range(1, k + 1):
        gens = tuple(letters[i] for i in range(s.n) if s.b[i] == kappa)
        ok = frozenset(accepted[kappa - 1])
        factors.append(
            FunctionalTable(gens, s.n, fn=lambda word, ok=ok: complex(word in ok))
        )
    word = tuple((s.b[i], letters[i][0], letters[i][1]) for i in range(s.n))
    return Product(family, factors).moment(word)


# -- the inclusion-exclusion moment formula ------------------------------------------------


def coarsest_refinements_in_class(c: ClassId, p: Partition) -> list[Partition]:
    """Maximal members of the class below p in the refinement order."""
    candidates = [q for q in _refinements_cached(p) if member(c, q)]
    candidates.sort(key=lambda q: q.block_count)
    out: list[Partition] = []
    for q in candidates:
        if not any(q.refines(r) for r in out):
            out.append(q)
    return out


_refinement_store: dict[Partition, tuple[Partition, ...]] = {}


def _refinements_cached(p: Partition) -> tuple[Partition, ...]:
    got = _refinement_store.get(p)
    if got is None:
        from .partitions import refinements

        got = tuple(refinements(p))
        _refinement_store[p] = got
    return got


def combinatorial_moment(
    c: ClassId,
    factors: Sequence[FunctionalTable],
    word: TaggedWord,
    cap: int = 64,
) -> complex:
    """The inclusion-exclusion form of the product moment for a 0/1 family.

    Sums, over nonempty subsets R of the coarsest refinements S of the factor
    partition inside the class, the sign (-1)^(|R|-1) times the product of
    factor moments over the blocks of the meet of R.
    """
    prod = Product(_indicator(c), factors)
    s = tagged_word_structure(word)
    pi = s.factor_partition()
    S = coarsest_refinements_in_class(c, pi)
    if len(S) > cap:
        raise BudgetExceeded(f"{len(S)} coarsest refinements exceed the cap {cap}")
    total = complex(0)
    for r in range(1, len(S) + 1):
        sign = (-1) ** (r - 1)
        for subset in itertools.combinations(S, r):
            wedge = meet(subset)
            term = complex(1)
            for block in wedge.blocks:
                term *= prod.moment(tuple(word[i - 1] for i in block))
            total += sign * term
    return total


_indicator_store: dict[ClassId, WeightFamily] = {}


def _indicator(c: ClassId) -> WeightFamily:
    fam = _indicator_store.get(c)
    if fam is None:
        from .weights import ClassIndicatorFamily

        fam = ClassIndicatorFamily(c)
        _indicator_store[c] = fam
    return fam


# -- unit preservation ------------------------------------------------------------------


def unit_preservation_check(
    family: WeightFamily,
    max_len: int = 4,
    seed: int = 0,
    samples: int = 40,
    eps: float = EPS,
) -> dict:
    """Compare the three unit-preservation verdicts.

    (1) inserting a per-face unit letter of either factor anywhere in a
    tagged word never changes the product moment; (2) the monochrome nesting
    coefficient is 1 for every face; (3) the weights are singleton
    inductive.  Returns the verdicts, their agreement, and a witness for a
    failing insertion, if any.
    """
    rng = random.Random(seed)
    faces = family.alphabet
    base1 = random_table(standard_generators(faces, per_face=1, prefix="a"), max_len + 1, rng)
    base2 = random_table(standard_generators(faces, per_face=1, prefix="c"), max_len + 1, rng)
    units1 = {f: (f, f"u1{f}") for f in faces}
    units2 = {f: (f, f"u2{f}") for f in faces}
    t1 = unit_extended_table(base1, units1)
    t2 = unit_extended_table(base2, units2)
    prod = Product(family, (t1, t2))
    normal = [(1, g[0], g[1]) for g in base1.generators] + [(2, g[0], g[1]) for g in base2.generators]
    witness = None
    for _ in range(samples):
        n = rng.randint(1, max_len)
        word = tuple(rng.choice(normal) for _ in range(n))
        base_value = prod.moment(word)
        for pos in range(n + 1):
            for kappa, units in ((1, units1), (2, units2)):
                for f in faces:
                    u = units[f]
                    inserted = word[:pos] + ((kappa, u[0], u[1]),) + word[pos:]
                    got = prod.moment(inserted)
                    if abs(got - base_value) > eps:
                        witness = {
                            "word": [list(t) for t in word],
                            "insert": [kappa, u[0], u[1]],
                            "position": pos,
                            "moment": base_value,
                            "with_unit": got,
                        }
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    insertion_invariant = witness is None
    bc = family.basic_coefficients()
    nu_all_one = all(abs(bc.nu[(q, q)] - 1) <= eps for q in faces)
    singleton = is_singleton_inductive(family, 5).inductive
    return {
        "insertion_invariant": insertion_invariant,
        "nu_all_one": nu_all_one,
        "singleton_inductive": singleton,
        "agree": insertion_invariant == nu_all_one == singleton,
        "witness": witness,
    }
