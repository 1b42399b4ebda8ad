"""Weight families on multi-faced partitions and the admissibility checker.

A weight family assigns a complex scalar to every partition, is monic
(value 1 on one-block partitions) and block-permutation invariant.  Families
are given by a class indicator, by a unit-circle deformation of the tensor,
free or bifree pattern, by an explicit table, or by a 0/1 predicate.

Class-indicator and deformed families are evaluated through the canonical
reduction: reduce, peel the first two legs with the split relation
``a(p) = a(p with the two blocks united) * a(two-block subpartition)``, and
resolve two-block partitions down to the four basic coefficients
(monochrome/bicolor nesting ``nu`` and crossing ``xi``).
"""

from __future__ import annotations

import cmath
import random
from typing import Callable

from .classes import ALL_CLASSES, ClassId, member
from .partitions import (
    DEFAULT_ALPHABET,
    Partition,
    all_words,
    enumerate_partitions,
    parse_diagram,
)

EPS = 1e-9


def approx(a: complex, b: complex, eps: float = EPS) -> bool:
    """Equality of complex scalars up to absolute tolerance."""
    return abs(a - b) <= eps


def on_unit_circle_or_zero(z: complex, eps: float = EPS) -> bool:
    """True iff z is within eps of 0 or of the unit circle."""
    return abs(z) <= eps or abs(abs(z) - 1.0) <= eps


# -- basic coefficients --------------------------------------------------------


class BasicCoefficients:
    """The four basic-diagram weights per ordered face pair.

    ``nu[(q, Q)]`` is the weight of the nesting diagram with inner legs q, Q
    (for q == Q the three-leg diagram with a single inner q-leg), and
    ``xi[(q, Q)]`` the weight of the crossing diagram with inner legs q, Q.
    """

    def __init__(self, nu: dict[tuple[str, str], complex], xi: dict[tuple[str, str], complex], alphabet=DEFAULT_ALPHABET):
        self.nu = dict(nu)
        self.xi = dict(xi)
        self.alphabet = tuple(alphabet)

    def sixtuple(self) -> tuple[complex, ...]:
        """(nu_w, nu_b, nu_wb, xi_w, xi_b, xi_wb) for the two-faced alphabet."""
        w, b = self.alphabet
        return (
            self.nu[(w, w)],
            self.nu[(b, b)],
            self.nu[(w, b)],
            self.xi[(w, w)],
            self.xi[(b, b)],
            self.xi[(w, b)],
        )

    def to_json(self) -> dict:
        w, b = self.alphabet
        def enc(z: complex):
            return z.real if abs(z.imag) <= EPS else {"re": z.real, "im": z.imag}
        return {
            "nu_w": enc(self.nu[(w, w)]),
            "nu_b": enc(self.nu[(b, b)]),
            "nu_wb": enc(self.nu[(w, b)]),
            "xi_w": enc(self.xi[(w, w)]),
            "xi_b": enc(self.xi[(b, b)]),
            "xi_wb": enc(self.xi[(w, b)]),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BasicCoefficients":
        w, b = DEFAULT_ALPHABET

        def dec(v) -> complex:
            if isinstance(v, dict):
                return complex(v.get("re", 0.0), v.get("im", 0.0))
            return complex(v)

        nu_w, nu_b = dec(obj["nu_w"]), dec(obj["nu_b"])
        nu_wb, xi_wb = dec(obj["nu_wb"]), dec(obj["xi_wb"])
        xi_w, xi_b = dec(obj["xi_w"]), dec(obj["xi_b"])
        nu = {(w, w): nu_w, (b, b): nu_b, (w, b): nu_wb, (b, w): nu_wb.conjugate()}
        xi = {(w, w): xi_w, (b, b): xi_b, (w, b): xi_wb, (b, w): xi_wb.conjugate()}
        return cls(nu, xi)

    def __repr__(self) -> str:
        return f"BasicCoefficients({self.to_json()})"


def check_basic_relations(bc: BasicCoefficients, eps: float = EPS):
    """Verify the five relations the basic coefficients always satisfy.

    (1) nu_q and xi_q are idempotent (hence 0 or 1);
    (2) t * nu_q = t for t in {nu_qQ, xi_q, xi_qQ};
    (3) |t|^2 t = t for the bicolor coefficients (values in {0} or the circle);
    (4) nu_qQ xi_q = xi_qQ xi_q;
    (5) nu_qQ xi_qQ = nu_qQ xi_qQ xi_q.
    Returns (ok, failures) where failures lists (relation, face pair).
    """
    failures: list[tuple[str, tuple[str, str]]] = []
    faces = bc.alphabet
    for q in faces:
        nq, xq = bc.nu[(q, q)], bc.xi[(q, q)]
        if not approx(nq * nq, nq, eps) or not approx(xq * xq, xq, eps):
            failures.append(("1", (q, q)))
        for Q in faces:
            nqQ, xqQ = bc.nu[(q, Q)], bc.xi[(q, Q)]
            for t in (nqQ, xq, xqQ):
                if not approx(t * nq, t, eps):
                    failures.append(("2", (q, Q)))
                    break
            for t in (nqQ, xqQ):
                if not approx(abs(t) ** 2 * t, t, eps):
                    failures.append(("3", (q, Q)))
                    break
            if not approx(nqQ * xq, xqQ * xq, eps):
                failures.append(("4", (q, Q)))
            if not approx(nqQ * xqQ, nqQ * xqQ * xq, eps):
                failures.append(("5", (q, Q)))
    return (not failures, failures)


# -- weight families ------------------------------------------------------------


class MissingEntryError(KeyError):
    """A table family was asked for a partition outside its table."""


class WeightFamily:
    """Base class: monic, block-permutation-invariant partition weights."""

    kind = "abstract"

    def __init__(self, alphabet=DEFAULT_ALPHABET, name: str = ""):
        self.alphabet = tuple(alphabet)
        self.name = name or self.kind
        self._cache: dict[Partition, complex] = {}
        self._flat_cache: dict[tuple, complex] = {}

    def evaluate(self, p: Partition) -> complex:
        v = self._cache.get(p)
        if v is None:
            v = self._value(p)
            self._cache[p] = v
        return v

    def evaluate_flat(self, faces: str, blocks) -> complex:
        """evaluate() keyed by raw (word, blocks) data; hot-loop helper."""
        key = (faces, blocks)
        v = self._flat_cache.get(key)
        if v is None:
            v = self.evaluate(Partition._unsafe(faces, blocks))
            self._flat_cache[key] = v
        return v

    def _value(self, p: Partition) -> complex:
        raise NotImplementedError

    def basic_coefficients(self) -> BasicCoefficients:
        """Evaluate the four defining diagrams for every ordered face pair."""
        nu: dict[tuple[str, str], complex] = {}
        xi: dict[tuple[str, str], complex] = {}
        for q in self.alphabet:
            for Q in self.alphabet:
                nu[(q, Q)], xi[(q, Q)] = self._basic_pair(q, Q)
        return BasicCoefficients(nu, xi, self.alphabet)

    def _basic_pair(self, q: str, Q: str) -> tuple[complex, complex]:
        if q == Q:
            nu_d = Partition(q * 3, [(1, 3), (2,)])
        else:
            nu_d = Partition(q + q + Q + Q, [(1, 4), (2, 3)])
        xi_d = Partition(q + q + Q + Q, [(1, 3), (2, 4)])
        return self.evaluate(nu_d), self.evaluate(xi_d)

    def descriptor(self) -> dict:
        raise NotImplementedError(f"{self.kind} family has no JSON descriptor")

    def __repr__(self) -> str:
        return f"<WeightFamily {self.name}>"


class ClassIndicatorFamily(WeightFamily):
    """Indicator weights of one of the twelve two-faced classes."""

    kind = "class"

    def __init__(self, class_id: ClassId):
        super().__init__(DEFAULT_ALPHABET, name=f"class:{class_id.value}")
        self.class_id = class_id
        self._bc = None

    def _basics(self) -> BasicCoefficients:
        if self._bc is None:
            nu, xi = {}, {}
            for q in self.alphabet:
                for Q in self.alphabet:
                    if q == Q:
                        nu_d = Partition(q * 3, [(1, 3), (2,)])
                    else:
                        nu_d = Partition(q + q + Q + Q, [(1, 4), (2, 3)])
                    xi_d = Partition(q + q + Q + Q, [(1, 3), (2, 4)])
                    nu[(q, Q)] = complex(member(self.class_id, nu_d))
                    xi[(q, Q)] = complex(member(self.class_id, xi_d))
            self._bc = BasicCoefficients(nu, xi, self.alphabet)
        return self._bc

    def _value(self, p: Partition) -> complex:
        return _canonical_value(p, self._basics(), self.evaluate)

    def basic_coefficients(self) -> BasicCoefficients:
        return self._basics()

    def descriptor(self) -> dict:
        return {"kind": "class", "class": self.class_id.value}


class DeformedFamily(WeightFamily):
    """One-parameter deformation of the tensor, free or bifree pattern.

    ``zeta`` is renormalized to the unit circle on input; the bicolor basic
    coefficients carry conj(zeta) in the (w, b) slot and zeta in (b, w).
    """

    kind = "deformed"
    BASES = ("tensor", "free", "bifree")

    def __init__(self, base: str, zeta: complex):
        if base not in self.BASES:
            raise ValueError(f"base must be one of {self.BASES}, got {base!r}")
        r = abs(zeta)
        if r <= EPS:
            raise ValueError("zeta must be nonzero")
        zeta = complex(zeta) / r
        super().__init__(DEFAULT_ALPHABET, name=f"deformed:{base}:{zeta:.4g}")
        self.base = base
        self.zeta = zeta
        w, b = self.alphabet
        one, zero = complex(1), complex(0)
        zc = zeta.conjugate()
        nu = {(w, w): one, (b, b): one, (w, b): zc, (b, w): zeta}
        if base == "tensor":
            xi = {(w, w): one, (b, b): one, (w, b): zc, (b, w): zeta}
        elif base == "free":
            xi = {(w, w): zero, (b, b): zero, (w, b): zero, (b, w): zero}
        else:  # bifree
            nu = {(w, w): one, (b, b): one, (w, b): zero, (b, w): zero}
            xi = {(w, w): zero, (b, b): zero, (w, b): zc, (b, w): zeta}
        self._bc = BasicCoefficients(nu, xi, self.alphabet)

    def _value(self, p: Partition) -> complex:
        return _canonical_value(p, self._bc, self.evaluate)

    def basic_coefficients(self) -> BasicCoefficients:
        return self._bc

    def descriptor(self) -> dict:
        return {
            "kind": "deformed",
            "base": self.base,
            "zeta": {"re": self.zeta.real, "im": self.zeta.imag},
        }


class TableFamily(WeightFamily):
    """Explicit table of weights, total up to ``max_legs`` legs."""

    kind = "table"

    def __init__(self, entries: dict[Partition, complex], max_legs: int, alphabet=DEFAULT_ALPHABET):
        super().__init__(alphabet, name=f"table:{max_legs}")
        self.entries = dict(entries)
        self.max_legs = max_legs

    def _value(self, p: Partition) -> complex:
        if p.n > self.max_legs:
            raise MissingEntryError(f"partition has {p.n} legs, table stops at {self.max_legs}")
        try:
            return self.entries[p]
        except KeyError:
            raise MissingEntryError(f"no table entry for {p}") from None

    def descriptor(self) -> dict:
        return {
            "kind": "table",
            "max_legs": self.max_legs,
            "entries": [
                {"partition": str(p), "value": {"re": v.real, "im": v.imag}}
                for p, v in sorted(self.entries.items(), key=lambda kv: str(kv[0]))
            ],
        }


class PredicateFamily(WeightFamily):
    """0/1 weights given by an arbitrary membership predicate."""

    kind = "predicate"

    def __init__(self, name: str, predicate: Callable[[Partition], bool], alphabet=DEFAULT_ALPHABET):
        super().__init__(alphabet, name=name)
        self.predicate = predicate

    def _value(self, p: Partition) -> complex:
        return complex(bool(self.predicate(p)))


def family_from_json(obj: dict) -> WeightFamily:
    """Build a weight family from its JSON descriptor."""
    kind = obj.get("kind")
    if kind == "class":
        return ClassIndicatorFamily(ClassId(obj["class"]))
    if kind == "deformed":
        z = obj["zeta"]
        if isinstance(z, dict):
            if "angle" in z:
                zeta = cmath.exp(1j * z["angle"])
            else:
                zeta = complex(z.get("re", 0.0), z.get("im", 0.0))
        else:
            zeta = complex(z)
        return DeformedFamily(obj["base"], zeta)
    if kind == "table":
        entries = {
            parse_diagram(e["partition"]): complex(e["value"].get("re", 0.0), e["value"].get("im", 0.0))
            for e in obj["entries"]
        }
        return TableFamily(entries, obj["max_legs"])
    raise ValueError(f"unknown weight family kind {kind!r}")


# -- the canonical reduction evaluator ------------------------------------------


def _canonical_value(p: Partition, bc: BasicCoefficients, rec: Callable[[Partition], complex]) -> complex:
    """Weight of p from its basic coefficients, along the canonical reduction.

    Deterministic tie-breaking: always reduce first, then operate at the left
    end (merge before face change before split).  Valid for families that
    satisfy the admissibility conditions; the confluence of differently
    ordered reductions is a tested property, not an assumption here.
    """
    p = p.reduce()
    if p.block_count <= 1 or p.is_interval():
        return complex(1)
    if p.block_count == 2:
        return _two_block_value(p, bc, rec)
    b1 = p._block_index[1]
    b2 = p._block_index[2]
    if b1 == b2:
        q = p.change_extremal_face("first", p.word[1])
        return rec(q.merge_legs(1))
    q = p.change_extremal_face("first", p.word[1])
    united = q.unite_blocks(q.blocks[b1], q.blocks[b2])
    remembered = q.restrict(q.blocks[b1] + q.blocks[b2])
    return rec(united) * rec(remembered)


def _two_block_value(p: Partition, bc: BasicCoefficients, rec: Callable[[Partition], complex]) -> complex:
    """Resolve a two-block partition to basic coefficients.

    Normalizes both ends (face-change plus merge while the two extremal legs
    of an end share a block), which shrinks any partition of more than four
    legs into a position where one block can be split; four legs or fewer hit
    the basic diagrams directly.
    """
    while True:
        p = p.reduce()
        if p.block_count <= 1 or p.is_interval():
            return complex(1)
        n = p.n
        if p._block_index[1] == p._block_index[2]:
            p = p.change_extremal_face("first", p.word[1]).merge_legs(1)
            continue
        if p._block_index[n] == p._block_index[n - 1]:
            p = p.change_extremal_face("last", p.word[n - 2]).merge_legs(n - 1)
            continue
        break
    n = p.n
    if n == 3:
        return bc.nu[(p.word[1], p.word[1])]
    if n == 4:
        if p._block_index[1] == p._block_index[4]:  # nesting {1,4},{2,3}
            return bc.nu[(p.word[1], p.word[2])]
        return bc.xi[(p.word[1], p.word[2])]  # crossing {1,3},{2,4}
    # n > 4: legs 1, 2 lie in distinct blocks; make their faces equal, split
    # the block of leg 3 at leg 3, and factor through the blocks of legs 1
    # and 2.  Both ends being normalized guarantees both factors have fewer
    # than n legs once their leading same-block runs merge away.
    p = p.change_extremal_face("first", p.word[1])
    split = p.split_block_at_leg(3)
    sb1 = split.block_of(1)
    sb2 = split.block_of(2)
    united = split.unite_blocks(sb1, sb2)
    remembered = split.restrict(sb1 + sb2)
    return rec(united) * rec(remembered)


def evaluate_randomized(family: WeightFamily, p: Partition, rng: random.Random) -> complex:
    """Evaluate along a randomized reduction order (confluence probe).

    Chooses random applicable rewrites: random mirror (with conjugation),
    random eligible position for the split relation, random end for the
    extremal normalization.  Only meaningful for reduction-backed families.
    """
    bc = family.basic_coefficients()

    def go(p: Partition) -> complex:
        p = p.reduce()
        if p.block_count <= 1 or p.is_interval():
            return complex(1)
        if rng.random() < 0.5:
            return go(p.mirror()).conjugate()
        if p.block_count >= 3:
            eligible = [
                i
                for i in range(1, p.n)
                if p._block_index[i] != p._block_index[i + 1] and p.word[i - 1] == p.word[i]
            ]
            if eligible:
                i = rng.choice(eligible)
                bi, bj = p._block_index[i], p._block_index[i + 1]
                united = p.unite_blocks(p.blocks[bi], p.blocks[bj])
                remembered = p.restrict(p.blocks[bi] + p.blocks[bj])
                return go(united) * go(remembered)
            # No same-face boundary between blocks: recolor a random end.
            if rng.random() < 0.5:
                p = p.mirror()
                conj = True
            else:
                conj = False
            q = p.change_extremal_face("first", p.word[1])
            if q._block_index[1] == q._block_index[2]:
                q = q.merge_legs(1)
                v = go(q)
            else:
                bi, bj = q._block_index[1], q._block_index[2]
                united = q.unite_blocks(q.blocks[bi], q.blocks[bj])
                remembered = q.restrict(q.blocks[bi] + q.blocks[bj])
                v = go(united) * go(remembered)
            return v.conjugate() if conj else v
        # Two blocks: use the deterministic resolver from a random end.
        if rng.random() < 0.5:
            return _two_block_value(p.mirror(), bc, go).conjugate()
        return _two_block_value(p, bc, go)

    return go(p)


# -- admissibility --------------------------------------------------------------


class AdmissibilityReport:
    """Outcome of the six-condition admissibility check.

    ``conditions`` maps 'i'..'vi' to None (holds) or a witness description;
    ``first_violation`` is the first failing condition in order, if any.
    """

    ORDER = ("i", "ii", "iii", "iv", "v", "vi")

    def __init__(self, family_name: str, max_legs: int):
        self.family_name = family_name
        self.max_legs = max_legs
        self.conditions: dict[str, dict | None] = {c: None for c in self.ORDER}

    @property
    def ok(self) -> bool:
        return all(v is None for v in self.conditions.values())

    @property
    def first_violation(self):
        for c in self.ORDER:
            if self.conditions[c] is not None:
                return (c, self.conditions[c])
        return None

    def record(self, cond: str, witness: Partition, detail: str) -> None:
        if self.conditions[cond] is None:
            self.conditions[cond] = {"witness": str(witness), "detail": detail}

    def to_json(self) -> dict:
        return {
            "family": self.family_name,
            "max_legs": self.max_legs,
            "pass": self.ok,
            "conditions": {k: v for k, v in self.conditions.items()},
        }


def check_admissible(family: WeightFamily, max_legs: int, eps: float = EPS) -> AdmissibilityReport:
    """Exhaustively verify the six admissibility conditions up to max_legs.

    (i) weight 1 on one-block partitions; (ii) weight 1 on the two-leg
    two-singleton partitions; (iii) invariance under reduction; (iv) the
    split relation at every same-face boundary between two blocks;
    (v) invariance under recoloring either extremal leg; (vi) mirror
    conjugation.  Violations are reported with witnesses, not raised.
    """
    report = AdmissibilityReport(family.name, max_legs)
    ev = family.evaluate
    for n in range(1, max_legs + 1):
        for word in all_words(family.alphabet, n):
            for p in enumerate_partitions(word):
                v = ev(p)
                if p.block_count == 1 and not approx(v, 1, eps):
                    report.record("i", p, f"value {v}")
                if n == 2 and p.block_count == 2 and not approx(v, 1, eps):
                    report.record("ii", p, f"value {v}")
                red = p.reduce()
                if red != p and not approx(v, ev(red), eps):
                    report.record("iii", p, f"{v} != {ev(red)} after reduction")
                for i in range(1, n):
                    bi, bj = p._block_index[i], p._block_index[i + 1]
                    if bi == bj or word[i - 1] != word[i]:
                        continue
                    united = p.unite_blocks(p.blocks[bi], p.blocks[bj])
                    remembered = p.restrict(p.blocks[bi] + p.blocks[bj])
                    if not approx(v, ev(united) * ev(remembered), eps):
                        report.record("iv", p, f"split at legs {i},{i + 1}")
                for end in ("first", "last"):
                    for face in family.alphabet:
                        q = p.change_extremal_face(end, face)
                        if not approx(v, ev(q), eps):
                            report.record("v", p, f"recolor {end} leg to {face}")
                if not approx(ev(p.mirror()), v.conjugate(), eps):
                    report.record("vi", p, f"mirror value {ev(p.mirror())} vs conj {v.conjugate()}")
    return report


# -- singleton inductivity --------------------------------------------------------


class SingletonReport:
    def __init__(self, inductive: bool, witness, nu_all_one: bool):
        self.inductive = inductive
        self.witness = witness
        self.nu_all_one = nu_all_one

    @property
    def agrees(self) -> bool:
        return self.inductive == self.nu_all_one

    def to_json(self) -> dict:
        return {
            "singleton_inductive": self.inductive,
            "witness": None if self.witness is None else str(self.witness),
            "nu_all_one": self.nu_all_one,
            "verdicts_agree": self.agrees,
        }


def is_singleton_inductive(family: WeightFamily, max_legs: int, eps: float = EPS) -> SingletonReport:
    """Check that removing any singleton block leaves the weight unchanged.

    Exhaustive up to max_legs; also cross-checks the equivalent condition
    that the monochrome nesting coefficient is 1 for every face.
    """
    witness = None
    for n in range(2, max_legs + 1):
        if witness:
            break
        for word in all_words(family.alphabet, n):
            if witness:
                break
            for p in enumerate_partitions(word):
                for b in p.blocks:
                    if len(b) != 1:
                        continue
                    smaller = p.restrict([leg for leg in range(1, n + 1) if leg != b[0]])
                    if not approx(family.evaluate(p), family.evaluate(smaller), eps):
                        witness = p
                        break
                if witness:
                    break
    bc = family.basic_coefficients()
    nu_all_one = all(approx(bc.nu[(q, q)], 1, eps) for q in family.alphabet)
    return SingletonReport(witness is None, witness, nu_all_one)


# -- concrete stock families -------------------------------------------------------


def class_family(c: ClassId | str) -> ClassIndicatorFamily:
    if isinstance(c, str):
        c = ClassId(c)
    return ClassIndicatorFamily(c)


def all_class_families() -> list[ClassIndicatorFamily]:
    return [ClassIndicatorFamily(c) for c in ALL_CLASSES]


def bi_interval_family() -> PredicateFamily:
    """Indicator of partitions that are interval in the zigzag leg order.

    The zigzag order lists the w-legs ascending, then the b-legs descending.
    This set is not mirror closed, so its indicator violates the mirror
    condition (vi); it serves as the mirror-asymmetric negative control.
    """

    def zigzag_interval(p: Partition) -> bool:
        order = [leg for leg in range(1, p.n + 1) if p.word[leg - 1] == "w"]
        order += [leg for leg in range(p.n, 0, -1) if p.word[leg - 1] == "b"]
        rank = {leg: i for i, leg in enumerate(order)}
        return all(
            sorted(rank[leg] for leg in b) == list(range(min(rank[leg] for leg in b), min(rank[leg] for leg in b) + len(b)))
            for b in p.blocks
        )

    return PredicateFamily("bi-interval", zigzag_interval)


class ConstantBlockFamily(WeightFamily):
    """Monic family with one constant weight on every multi-block partition.

    Deliberately violates the split relation (iv); serves as the
    non-admissible negative control for well-definedness checks.
    """

    kind = "broken-constant"

    def __init__(self, value: complex = 0.7):
        super().__init__(DEFAULT_ALPHABET, name=f"broken-constant:{value}")
        self.value = complex(value)

    def _value(self, p: Partition) -> complex:
        return complex(1) if p.block_count <= 1 else self.value
