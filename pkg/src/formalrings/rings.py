"""Finite unital rings stored as dense addition and multiplication tables.

Elements are the integers ``0 .. size-1``. All structure (units, radical,
residue field) is computed by exhaustive scans, which is the point: carriers
stay small and tables make every law checkable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import AxiomViolation, InternalCheckFailed, NotLocal

_EXHAUSTIVE_LIMIT = 256
_SAMPLES = 20000


def _table(values, size: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    if arr.shape != (size, size):
        raise AxiomViolation(f"{what} table shape", {"expected": [size, size], "got": list(arr.shape)})
    if size and (arr.min() < 0 or arr.max() >= size):
        raise AxiomViolation(f"{what} table range", {"min": int(arr.min()), "max": int(arr.max())})
    return arr.astype(np.int32 if size > 255 else np.int16)


def _triples(n: int, rng: np.random.Generator | None, limit: int):
    """Yield blocks (a, b, c) of index arrays covering all triples, or a sample."""
    if n <= limit:
        a = np.arange(n)
        step = max(1, (1 << 20) // max(1, n * n))
        for start in range(0, n, step):
            block = a[start:start + step]
            A, B, C = np.meshgrid(block, a, a, indexing="ij")
            yield A.ravel(), B.ravel(), C.ravel()
    else:
        rng = rng or np.random.default_rng(0)
        yield tuple(rng.integers(0, n, size=_SAMPLES) for _ in range(3))


def _first(mask_bad, *arrays):
    idx = int(np.flatnonzero(mask_bad)[0])
    return tuple(int(x[idx]) for x in arrays)


@dataclass(frozen=True, eq=False)
class FiniteRing:
    add: np.ndarray
    mul: np.ndarray
    zero: int
    one: int
    labels: tuple[str, ...] | None = None
    name: str | None = None

    @property
    def size(self) -> int:
        return int(self.add.shape[0])

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        tag = self.name or "FiniteRing"
        return f"<{tag} size={self.size}>"

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    @property
    def is_zero_ring(self) -> bool:
        return self.size == 1

    @cached_property
    def neg(self) -> np.ndarray:
        return np.argmax(self.add == self.zero, axis=1)

    def sub(self, a, b):
        return self.add[a, self.neg[b]]

    @cached_property
    def units(self) -> frozenset[int]:
        return units(self)

    @cached_property
    def unit_mask(self) -> np.ndarray:
        m = np.zeros(self.size, dtype=bool)
        m[list(self.units)] = True
        return m

    @cached_property
    def radical(self) -> frozenset[int]:
        return jacobson_radical(self)

    @cached_property
    def radical_mask(self) -> np.ndarray:
        m = np.zeros(self.size, dtype=bool)
        m[list(self.radical)] = True
        return m

    @cached_property
    def is_local(self) -> bool:
        return is_local(self)

    @cached_property
    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def characteristic(self) -> int:
        x, k = self.one, 1
        while x != self.zero:
            x = int(self.add[x, self.one])
            k += 1
        return k

    @cached_property
    def additive_orders(self) -> np.ndarray:
        orders = np.ones(self.size, dtype=np.int64)
        for x in range(self.size):
            y, k = x, 1
            while y != self.zero:
                y = int(self.add[y, x])
                k += 1
            orders[x] = k
        return orders

    @cached_property
    def is_field(self) -> bool:
        return self.size > 1 and len(self.units) == self.size - 1

    def same_tables(self, other: "FiniteRing") -> bool:
        return (
            self.size == other.size
            and self.zero == other.zero
            and self.one == other.one
            and np.array_equal(self.add, other.add)
            and np.array_equal(self.mul, other.mul)
        )

    def power(self, x: int, k: int) -> int:
        r = self.one
        for _ in range(k):
            r = int(self.mul[r, x])
        return r

    @classmethod
    def from_functions(
        cls,
        elements: Sequence,
        add: Callable,
        mul: Callable,
        zero,
        one,
        labels: Sequence[str] | None = None,
        name: str | None = None,
        check: bool = True,
    ) -> "FiniteRing":
        index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        A = [[index[add(a, b)] for b in elements] for a in elements]
        M = [[index[mul(a, b)] for b in elements] for a in elements]
        labels = tuple(labels) if labels is not None else tuple(str(e) for e in elements)
        if check:
            return validate_ring(A, M, index[zero], index[one], labels=labels, name=name)
        return cls(_table(A, n, "add"), _table(M, n, "mul"), index[zero], index[one], labels, name)


def validate_ring(
    add,
    mul,
    zero: int,
    one: int,
    labels: Sequence[str] | None = None,
    name: str | None = None,
    exhaustive_limit: int = _EXHAUSTIVE_LIMIT,
) -> FiniteRing:
    """Check every ring axiom and return the ring.

    Triples are checked exhaustively up to ``exhaustive_limit`` elements and
    sampled (seeded) beyond it.
    """
    add = np.asarray(add)
    n = int(add.shape[0]) if add.ndim == 2 else len(add)
    if n < 1:
        raise AxiomViolation("nonempty carrier", {"size": n})
    A = _table(add, n, "add")
    M = _table(mul, n, "mul")
    if not (0 <= zero < n and 0 <= one < n):
        raise AxiomViolation("zero/one in carrier", {"zero": zero, "one": one})
    ar = np.arange(n)
    if not (np.array_equal(A[zero], ar) and np.array_equal(A[:, zero], ar)):
        bad = np.flatnonzero((A[zero] != ar) | (A[:, zero] != ar))
        raise AxiomViolation("additive identity", (int(bad[0]),))
    if not np.array_equal(A, A.T):
        a, b = np.argwhere(A != A.T)[0]
        raise AxiomViolation("additive commutativity", (int(a), int(b)))
    has_neg = (A == zero).any(axis=1)
    if not has_neg.all():
        raise AxiomViolation("additive inverse", (int(np.flatnonzero(~has_neg)[0]),))
    if not (np.array_equal(M[one], ar) and np.array_equal(M[:, one], ar)):
        bad = np.flatnonzero((M[one] != ar) | (M[:, one] != ar))
        raise AxiomViolation("multiplicative identity", (int(bad[0]),))
    rng = np.random.default_rng(0)
    for a, b, c in _triples(n, rng, exhaustive_limit):
        bad = A[A[a, b], c] != A[a, A[b, c]]
        if bad.any():
            raise AxiomViolation("additive associativity", _first(bad, a, b, c))
        bad = M[a, A[b, c]] != A[M[a, b], M[a, c]]
        if bad.any():
            raise AxiomViolation("left distributivity", _first(bad, a, b, c))
        bad = M[A[a, b], c] != A[M[a, c], M[b, c]]
        if bad.any():
            raise AxiomViolation("right distributivity", _first(bad, a, b, c))
        bad = M[M[a, b], c] != M[a, M[b, c]]
        if bad.any():
            raise AxiomViolation("multiplicative associativity", _first(bad, a, b, c))
    return FiniteRing(A, M, int(zero), int(one), tuple(labels) if labels else None, name)


def units(R: FiniteRing) -> frozenset[int]:
    """Two-sided invertible elements."""
    L = R.mul == R.one
    both = (L & L.T).any(axis=1)
    return frozenset(int(x) for x in np.flatnonzero(both))


def jacobson_radical(R: FiniteRing) -> frozenset[int]:
    """J(R) = {x : 1 - r x is a unit for every r}, checked to be an ideal."""
    if R.size == 1:
        return frozenset({R.zero})
    one_minus = R.add[R.one, R.neg[R.mul]]  # [r, x] -> 1 - r x
    J = np.flatnonzero(R.unit_mask[one_minus].all(axis=0))
    Js = frozenset(int(x) for x in J)
    mask = np.zeros(R.size, dtype=bool)
    mask[J] = True
    if not (mask[R.add[np.ix_(J, J)]].all() and mask[R.mul[:, J]].all() and mask[R.mul[J, :]].all()):
        raise InternalCheckFailed("computed radical is not a two-sided ideal", witness=sorted(Js))
    return Js


def is_nilpotent_set(R: FiniteRing, S: frozenset[int]) -> bool:
    """True iff some power of the additive span of S-products is {0}."""
    cur = set(S)
    for _ in range(R.size + 1):
        if cur <= {R.zero}:
            return True
        nxt = {int(R.mul[a, b]) for a in cur for b in S}
        if nxt == cur:
            return False
        cur = nxt
    return False


def is_local(R: FiniteRing) -> bool:
    if R.size == 1:
        return False
    non_units = np.flatnonzero(~R.unit_mask)
    mask = ~R.unit_mask
    return bool(mask[R.add[np.ix_(non_units, non_units)]].all())


def quotient_ring(R: FiniteRing, ideal: frozenset[int], name: str | None = None) -> tuple[FiniteRing, np.ndarray]:
    """R / I for a two-sided ideal I; returns the quotient and the projection."""
    I = np.array(sorted(ideal))
    proj = -np.ones(R.size, dtype=np.int64)
    reps: list[int] = []
    for x in range(R.size):
        if proj[x] >= 0:
            continue
        coset = R.add[x, I]
        proj[coset] = len(reps)
        reps.append(x)
    reps_a = np.array(reps)
    add = proj[R.add[np.ix_(reps_a, reps_a)]]
    mul = proj[R.mul[np.ix_(reps_a, reps_a)]]
    labels = tuple(f"[{R.label(r)}]" for r in reps)
    Q = validate_ring(add, mul, int(proj[R.zero]), int(proj[R.one]), labels=labels, name=name)
    return Q, proj


@dataclass(frozen=True)
class LocalStructure:
    residue_field: FiniteRing
    projection: np.ndarray  # R element -> residue element
    lifts: np.ndarray  # residue element -> least preimage


def residue_field(R: FiniteRing) -> LocalStructure:
    """Quotient R/J(R) for a local ring, with projection and canonical lifts."""
    cached = R.__dict__.get("_local_structure")
    if cached is not None:
        return cached
    if not R.is_local:
        raise NotLocal(0, witness={"ring": R.name})
    F, proj = quotient_ring(R, R.radical, name=f"res({R.name})" if R.name else None)
    if not F.is_field:
        raise InternalCheckFailed("residue ring of a local ring is not a skew field")
    lifts = np.array([int(np.flatnonzero(proj == k)[0]) for k in range(F.size)])
    out = LocalStructure(F, proj, lifts)
    R.__dict__["_local_structure"] = out
    return out


def opposite(R: FiniteRing) -> FiniteRing:
    if R.is_commutative:
        return R
    name = f"op({R.name})" if R.name else None
    return FiniteRing(R.add, np.ascontiguousarray(R.mul.T), R.zero, R.one, R.labels, name)


# ---------------------------------------------------------------- ring maps

def is_ring_homomorphism(A: FiniteRing, B: FiniteRing, f) -> bool:
    f = np.asarray(f)
    if f[A.one] != B.one:
        return False
    return bool(
        np.array_equal(f[A.add], B.add[f[:, None], f[None, :]])
        and np.array_equal(f[A.mul], B.mul[f[:, None], f[None, :]])
    )


def multiplicative_order(F: FiniteRing, x: int) -> int:
    y, k = x, 1
    while y != F.one:
        y = int(F.mul[y, x])
        k += 1
        if k > F.size:
            return 0
    return k


def primitive_element(F: FiniteRing) -> int:
    for x in range(F.size):
        if x != F.zero and multiplicative_order(F, x) == F.size - 1:
            return x
    raise InternalCheckFailed("no primitive element: not a finite field")


def field_isomorphisms(A: FiniteRing, B: FiniteRing, first_only: bool = False) -> list[np.ndarray]:
    """All ring isomorphisms between two finite fields, as image arrays."""
    if not (A.is_field and B.is_field) or A.size != B.size or A.characteristic != B.characteristic:
        return []
    alpha = primitive_element(A)
    powers = [A.one]
    for _ in range(A.size - 2):
        powers.append(int(A.mul[powers[-1], alpha]))
    out = []
    for beta in range(B.size):
        if beta == B.zero or multiplicative_order(B, beta) != B.size - 1:
            continue
        f = np.empty(A.size, dtype=np.int64)
        f[A.zero] = B.zero
        y = B.one
        for p in powers:
            f[p] = y
            y = int(B.mul[y, beta])
        if is_ring_homomorphism(A, B, f):
            out.append(f)
            if first_only:
                break
    return out


def field_automorphisms(F: FiniteRing) -> list[np.ndarray]:
    return field_isomorphisms(F, F)


def frobenius(F: FiniteRing) -> np.ndarray:
    """x -> x^p on a finite field of characteristic p."""
    p = F.characteristic
    return np.array([F.power(x, p) if x != F.zero else F.zero for x in range(F.size)])


def compose_maps(*maps) -> np.ndarray:
    """compose_maps(f, g) = f after g."""
    out = np.asarray(maps[-1])
    for f in reversed(maps[:-1]):
        out = np.asarray(f)[out]
    return out


def invert_map(f) -> np.ndarray:
    f = np.asarray(f)
    inv = np.empty_like(f)
    inv[f] = np.arange(len(f))
    return inv


# ------------------------------------------------------------- generators

@lru_cache(maxsize=None)
def zmod(n: int) -> FiniteRing:
    if n < 1:
        raise ValueError("modulus must be positive")
    ar = np.arange(n)
    add = (ar[:, None] + ar[None, :]) % n
    mul = (ar[:, None] * ar[None, :]) % n
    return validate_ring(add, mul, 0, 1 % n, labels=[str(i) for i in range(n)], name=f"Z/{n}")


def prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, m = 0, q
    while m % p == 0:
        m //= p
        e += 1
    return (p, e) if m == 1 else None


def _poly_label(coeffs: Sequence[int], var: str = "x") -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "1" if i == 0 else (var if i == 1 else f"{var}^{i}")
        terms.append(mono if c == 1 else (f"{c}" if i == 0 else f"{c}{mono}"))
    return "+".join(terms) if terms else "0"


def _digits(x: int, base: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        x, d = divmod(x, base)
        out.append(d)
    return tuple(out)


def _polymulmod(a, b, p: int, modulus) -> tuple[int, ...]:
    e = len(modulus) - 1
    prod = [0] * (2 * e)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, e - 1, -1):
        c = prod[d]
        if c:
            for t in range(e + 1):
                prod[d - e + t] = (prod[d - e + t] - c * modulus[t]) % p
    return tuple(prod[:e])


@lru_cache(maxsize=None)
def galois_field(q: int) -> FiniteRing:
    """GF(q) with the lexicographically least monic irreducible modulus."""
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"GF({q}) does not exist")
    p, e = pe
    if e == 1:
        F = zmod(p)
        return FiniteRing(F.add, F.mul, F.zero, F.one, F.labels, f"GF({q})")
    elems = [_digits(x, p, e) for x in range(q)]
    for tail in itertools.product(range(p), repeat=e):
        if tail[0] == 0:
            continue
        modulus = tuple(tail) + (1,)
        R = FiniteRing.from_functions(
            elems,
            lambda a, b: tuple((x + y) % p for x, y in zip(a, b)),
            lambda a, b, m=modulus: _polymulmod(a, b, p, m),
            elems[0],
            elems[1],
            labels=[_poly_label(c) for c in elems],
            name=f"GF({q})",
            check=False,
        )
        if R.is_field:
            return validate_ring(R.add, R.mul, R.zero, R.one, labels=R.labels, name=f"GF({q})")
    raise InternalCheckFailed(f"no irreducible polynomial found for GF({q})")


def _coeff_ring_ops(F: FiniteRing):
    return (lambda a, b: int(F.add[a, b])), (lambda a, b: int(F.mul[a, b]))


@lru_cache(maxsize=None)
def truncated_polynomial(q: int, k: int) -> FiniteRing:
    """GF(q)[x]/(x^k)."""
    F = galois_field(q)
    fadd, fmul = _coeff_ring_ops(F)
    elems = [_digits(x, q, k) for x in range(q ** k)]

    def mul(a, b):
        out = [F.zero] * k
        for i, x in enumerate(a):
            for j in range(k - i):
                out[i + j] = fadd(out[i + j], fmul(x, b[j]))
        return tuple(out)

    labels = [_poly_label(e) if q == F.characteristic else str(e) for e in elems]
    return FiniteRing.from_functions(
        elems,
        lambda a, b: tuple(fadd(x, y) for x, y in zip(a, b)),
        mul,
        elems[0],
        elems[1],
        labels=labels,
        name=f"GF({q})[x]/(x^{k})",
    )


@lru_cache(maxsize=None)
def square_zero_local(q: int, d: int) -> FiniteRing:
    """GF(q)[x1..xd]/(x1..xd)^2: local, radical squared zero, socle of dimension d."""
    F = galois_field(q)
    fadd, fmul = _coeff_ring_ops(F)
    elems = [_digits(x, q, d + 1) for x in range(q ** (d + 1))]

    def mul(a, b):
        head = fmul(a[0], b[0])
        rest = tuple(fadd(fmul(a[0], y), fmul(x, b[0])) for x, y in zip(a[1:], b[1:]))
        return (head,) + rest

    name = f"GF({q})[x]/(x^2)" if d == 1 else (
        "GF({q})[x,y]/(x^2,xy,y^2)".format(q=q) if d == 2 else f"GF({q})[x1..x{d}]/(x)^2"
    )
    return FiniteRing.from_functions(
        elems,
        lambda a, b: tuple(fadd(x, y) for x, y in zip(a, b)),
        mul,
        elems[0],
        elems[1],
        labels=[str(e) for e in elems],
        name=name,
    )
