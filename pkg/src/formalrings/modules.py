"""Finite one-sided modules and bimodules over finite rings.

A one-sided module stores ``act[m, r]``: the product ``m·r`` for a right
module and ``r·m`` for a left module, so the same scanning code serves both
sides. Submodules are element sets of the ambient carrier.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import AxiomViolation, EmbeddingNotFound, InternalCheckFailed, SizeLimitExceeded
from .rings import FiniteRing, opposite, residue_field

RIGHT = "right"
LEFT = "left"

_EXHAUSTIVE_LIMIT = 1 << 21


def _small(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    return a.astype(np.int32 if a.size and a.max() > 32000 else np.int16)


def _check_group(add: np.ndarray, zero: int) -> None:
    n = add.shape[0]
    ar = np.arange(n)
    if add.shape != (n, n) or (n and (add.min() < 0 or add.max() >= n)):
        raise AxiomViolation("module addition table shape/range")
    if not (np.array_equal(add[zero], ar) and np.array_equal(add[:, zero], ar)):
        raise AxiomViolation("module additive identity", (zero,))
    if not np.array_equal(add, add.T):
        a, b = np.argwhere(add != add.T)[0]
        raise AxiomViolation("module additive commutativity", (int(a), int(b)))
    if not (add == zero).any(axis=1).all():
        raise AxiomViolation("module additive inverse")
    if n ** 3 <= _EXHAUSTIVE_LIMIT:
        bad = add[add[:, :, None], ar[None, None, :]] != add[ar[:, None, None], add[None, :, :]]
        if bad.any():
            raise AxiomViolation("module additive associativity", tuple(int(x) for x in np.argwhere(bad)[0]))


def _check_action(ring: FiniteRing, side: str, add: np.ndarray, act: np.ndarray, zero: int) -> None:
    n, m = add.shape[0], ring.size
    if act.shape != (n, m) or (act.min() < 0 or act.max() >= n):
        raise AxiomViolation(f"{side} action table shape/range")
    if not np.array_equal(act[:, ring.one], np.arange(n)):
        bad = int(np.flatnonzero(act[:, ring.one] != np.arange(n))[0])
        raise AxiomViolation(f"{side} action unital", (bad,))
    if n * n * m <= _EXHAUSTIVE_LIMIT:
        # (x + y) r = x r + y r
        bad = act[add, :] != add[act[:, None, :], act[None, :, :]]
        if bad.any():
            raise AxiomViolation(f"{side} action additive in module", tuple(int(x) for x in np.argwhere(bad)[0]))
    if n * m * m <= _EXHAUSTIVE_LIMIT:
        # x (r + s) = x r + x s
        bad = act[:, ring.add] != add[act[:, :, None], act[:, None, :]]
        if bad.any():
            raise AxiomViolation(f"{side} action additive in ring", tuple(int(x) for x in np.argwhere(bad)[0]))
        if side == RIGHT:
            bad = act[act[:, :, None], np.arange(m)[None, None, :]] != act[:, ring.mul]
        else:
            # (r s) x = r (s x): act[x, rs] == act[act[x, s], r]
            bad = act[:, ring.mul] != act[act[:, None, :], np.arange(m)[None, :, None]]
        if bad.any():
            raise AxiomViolation(f"{side} action associative", tuple(int(x) for x in np.argwhere(bad)[0]))


@dataclass(frozen=True, eq=False)
class FiniteModule:
    ring: FiniteRing
    side: str
    add: np.ndarray
    act: np.ndarray
    zero: int = 0
    labels: tuple[str, ...] | None = None

    @property
    def size(self) -> int:
        return int(self.add.shape[0])

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"<{self.side} module size={self.size} over {self.ring!r}>"

    @cached_property
    def neg(self) -> np.ndarray:
        return np.argmax(self.add == self.zero, axis=1)

    @cached_property
    def additive_orders(self) -> np.ndarray:
        out = np.ones(self.size, dtype=np.int64)
        for x in range(self.size):
            y, k = x, 1
            while y != self.zero:
                y = int(self.add[y, x])
                k += 1
            out[x] = k
        return out

    def cyclic(self, x: int) -> frozenset[int]:
        """x·R (or R·x): already an additive subgroup because R is unital."""
        return frozenset(int(v) for v in np.unique(self.act[x]))

    @cached_property
    def cyclic_sizes(self) -> np.ndarray:
        s = np.sort(self.act, axis=1)
        return 1 + (np.diff(s, axis=1) != 0).sum(axis=1)

    def annihilator(self, x: int | None = None) -> frozenset[int]:
        if x is None:
            kill = (self.act == self.zero).all(axis=0)
        else:
            kill = self.act[x] == self.zero
        return frozenset(int(r) for r in np.flatnonzero(kill))

    def everything(self) -> "Submodule":
        return Submodule(self, frozenset(range(self.size)))

    def nothing(self) -> "Submodule":
        return Submodule(self, frozenset({self.zero}))


def validate_module(ring: FiniteRing, side: str, add, act, zero: int = 0, labels=None) -> FiniteModule:
    add = _small(add)
    act = _small(act)
    _check_group(add, zero)
    _check_action(ring, side, add, act, zero)
    return FiniteModule(ring, side, add, act, zero, tuple(labels) if labels else None)


@dataclass(frozen=True, eq=False)
class FiniteBimodule:
    """``left[r, m] = r·m`` and ``right[m, s] = m·s``."""

    left_ring: FiniteRing
    right_ring: FiniteRing
    add: np.ndarray
    left: np.ndarray
    right: np.ndarray
    zero: int = 0
    labels: tuple[str, ...] | None = None
    name: str | None = None

    @property
    def size(self) -> int:
        return int(self.add.shape[0])

    def __len__(self) -> int:
        return self.size

    @property
    def is_zero(self) -> bool:
        return self.size == 1

    def __repr__(self) -> str:
        return f"<bimodule {self.name or ''} size={self.size}>"

    @cached_property
    def neg(self) -> np.ndarray:
        return np.argmax(self.add == self.zero, axis=1)

    @cached_property
    def as_right(self) -> FiniteModule:
        return FiniteModule(self.right_ring, RIGHT, self.add, self.right, self.zero, self.labels)

    @cached_property
    def as_left(self) -> FiniteModule:
        return FiniteModule(self.left_ring, LEFT, self.add, np.ascontiguousarray(self.left.T), self.zero, self.labels)

    def side(self, side: str) -> FiniteModule:
        return self.as_right if side == RIGHT else self.as_left

    def same_tables(self, other: "FiniteBimodule") -> bool:
        return (
            self.size == other.size
            and self.zero == other.zero
            and np.array_equal(self.add, other.add)
            and np.array_equal(self.left, other.left)
            and np.array_equal(self.right, other.right)
        )


def validate_bimodule(left_ring, right_ring, add, left, right, zero: int = 0, labels=None, name=None) -> FiniteBimodule:
    add = _small(add)
    left = _small(left)
    right = _small(right)
    _check_group(add, zero)
    _check_action(right_ring, RIGHT, add, right, zero)
    _check_action(left_ring, LEFT, add, np.ascontiguousarray(left.T), zero)
    n = add.shape[0]
    if n * left_ring.size * right_ring.size <= _EXHAUSTIVE_LIMIT:
        lhs = right[left[:, :, None], np.arange(right_ring.size)[None, None, :]]  # (r m) s
        rhs = left[np.arange(left_ring.size)[:, None, None], right[None, :, :]]  # r (m s)
        bad = lhs != rhs
        if bad.any():
            raise AxiomViolation("actions commute", tuple(int(x) for x in np.argwhere(bad)[0]))
    else:
        rng = np.random.default_rng(0)
        r = rng.integers(0, left_ring.size, 20000)
        m = rng.integers(0, n, 20000)
        s = rng.integers(0, right_ring.size, 20000)
        bad = right[left[r, m], s] != left[r, right[m, s]]
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise AxiomViolation("actions commute", (int(r[i]), int(m[i]), int(s[i])))
    return FiniteBimodule(left_ring, right_ring, add, left, right, zero, tuple(labels) if labels else None, name)


def as_module(M, side: str | None = None) -> FiniteModule:
    if isinstance(M, FiniteModule):
        return M
    return M.side(side or RIGHT)


# ------------------------------------------------------------- bimodules

def regular_bimodule(R: FiniteRing) -> FiniteBimodule:
    return FiniteBimodule(R, R, R.add, R.mul, R.mul, R.zero, R.labels, name="ring")


def zero_bimodule(L: FiniteRing, R: FiniteRing) -> FiniteBimodule:
    z = np.zeros((1, 1), dtype=np.int16)
    return FiniteBimodule(L, R, z, np.zeros((L.size, 1), dtype=np.int16), np.zeros((1, R.size), dtype=np.int16), 0, ("0",), name="zero")


def pullback_bimodule(B: FiniteBimodule, left_ring: FiniteRing, left_hom, right_ring: FiniteRing, right_hom, name=None) -> FiniteBimodule:
    """Restrict scalars along ring homomorphisms into B's rings."""
    left_hom = np.asarray(left_hom)
    right_hom = np.asarray(right_hom)
    return validate_bimodule(
        left_ring, right_ring, B.add, B.left[left_hom, :], B.right[:, right_hom], B.zero, B.labels, name=name or B.name
    )


def residue_bimodule(L: FiniteRing, R: FiniteRing, iso=None) -> FiniteBimodule:
    """Residue field of local L as an L-R bimodule through the projections.

    ``iso`` maps the residue field of R onto that of L; identity by default,
    which requires the two residue fields to share tables.
    """
    ls = residue_field(L)
    rs = residue_field(R)
    F = ls.residue_field
    if iso is None:
        if not F.same_tables(rs.residue_field):
            raise ValueError("residue fields differ; pass an explicit isomorphism")
        iso = np.arange(F.size)
    reg = regular_bimodule(F)
    return pullback_bimodule(reg, L, ls.projection, R, np.asarray(iso)[rs.projection], name="residue")


def opposite_bimodule(B: FiniteBimodule) -> FiniteBimodule:
    """B as an R^op-L^op bimodule."""
    return FiniteBimodule(
        opposite(B.right_ring), opposite(B.left_ring), B.add,
        np.ascontiguousarray(B.right.T), np.ascontiguousarray(B.left.T), B.zero, B.labels, B.name,
    )


def sub_bimodule(B: FiniteBimodule, elements: Iterable[int], name=None) -> tuple[FiniteBimodule, np.ndarray]:
    """Relabel a sub-bimodule onto 0..k-1. Returns it and the inclusion map."""
    elems = np.array(sorted(set(int(e) for e in elements)))
    index = -np.ones(B.size, dtype=np.int64)
    index[elems] = np.arange(len(elems))
    add = index[B.add[np.ix_(elems, elems)]]
    left = index[B.left[:, elems]]
    right = index[B.right[elems, :]]
    if (add < 0).any() or (left < 0).any() or (right < 0).any():
        raise ValueError("element set is not a sub-bimodule")
    labels = tuple(B.labels[e] for e in elems) if B.labels else None
    sub = FiniteBimodule(B.left_ring, B.right_ring, _small(add), _small(left), _small(right), int(index[B.zero]), labels, name)
    return sub, elems


# ------------------------------------------------------------ submodules

@dataclass(frozen=True, eq=False)
class Submodule:
    ambient: FiniteModule
    elements: frozenset[int]

    @property
    def side(self) -> str:
        return self.ambient.side

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def __iter__(self):
        return iter(sorted(self.elements))

    def __eq__(self, other) -> bool:
        if isinstance(other, Submodule):
            return self.elements == other.elements
        return self.elements == frozenset(other)

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"Submodule({sorted(self.elements)})"

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.ambient.size, dtype=bool)
        m[list(self.elements)] = True
        return m

    @property
    def is_zero(self) -> bool:
        return self.elements == {self.ambient.zero}


def _sumset(M: FiniteModule, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.unique(M.add[A[:, None], B[None, :]])


def sum_submodules(M: FiniteModule, *parts) -> Submodule:
    cur = np.array([M.zero])
    for p in parts:
        elems = p.elements if isinstance(p, Submodule) else p
        cur = _sumset(M, cur, np.array(sorted(elems)))
    return Submodule(M, frozenset(int(x) for x in cur))


def generated_submodule(M: FiniteModule, gens: Iterable[int]) -> Submodule:
    cur = np.array([M.zero])
    for g in gens:
        cur = _sumset(M, cur, np.unique(M.act[g]))
    return Submodule(M, frozenset(int(x) for x in cur))


def is_submodule(M: FiniteModule, elements: Iterable[int]) -> bool:
    E = np.array(sorted(set(elements)))
    if M.zero not in set(E.tolist()):
        return False
    mask = np.zeros(M.size, dtype=bool)
    mask[E] = True
    return bool(mask[M.add[np.ix_(E, E)]].all() and mask[M.act[E, :]].all())


def radical_submodule(M: FiniteModule) -> Submodule:
    """M·J(R) (or J(R)·M)."""
    J = sorted(M.ring.radical)
    gens = np.unique(M.act[:, J])
    cur = np.array([M.zero])
    for g in gens:
        if g not in cur:
            cur = _sumset(M, cur, np.array([M.zero, g]))
            # close under multiples of g
            while True:
                nxt = _sumset(M, cur, cur)
                if len(nxt) == len(cur):
                    break
                cur = nxt
    return Submodule(M, frozenset(int(x) for x in cur))


def socle(M, side: str | None = None, check: bool = True) -> Submodule:
    """Elements killed by the Jacobson radical of the acting ring.

    For finite (hence semiprimary) rings this is the socle. Small carriers are
    cross-checked against the sum of all simple submodules.
    """
    M = as_module(M, side)
    J = sorted(M.ring.radical)
    keep = (M.act[:, J] == M.zero).all(axis=1)
    S = Submodule(M, frozenset(int(x) for x in np.flatnonzero(keep)))
    if check and M.size <= config.SOCLE_ORACLE_LIMIT:
        brute = socle_by_simples(M)
        if brute.elements != S.elements:
            raise InternalCheckFailed("socle formula disagrees with sum of simple submodules",
                                      witness={"annihilator": sorted(S.elements), "simples": sorted(brute.elements)})
    return S


def simple_cyclic_generators(M: FiniteModule) -> list[int]:
    """Nonzero x whose cyclic submodule is simple."""
    sizes = M.cyclic_sizes
    out = []
    for x in range(M.size):
        if x == M.zero:
            continue
        C = np.unique(M.act[x])
        C = C[C != M.zero]
        if (sizes[C] == sizes[x]).all():
            out.append(x)
    return out


def socle_by_simples(M, side: str | None = None) -> Submodule:
    """Sum of all simple submodules, found among cyclic submodules."""
    M = as_module(M, side)
    cur = np.array([M.zero])
    for x in simple_cyclic_generators(M):
        if x not in cur:
            cur = _sumset(M, cur, np.unique(M.act[x]))
    return Submodule(M, frozenset(int(x) for x in cur))


def is_simple(M, side: str | None = None) -> bool:
    M = as_module(M, side)
    if M.size <= 1:
        return False
    sizes = M.cyclic_sizes
    nz = np.arange(M.size) != M.zero
    return bool((sizes[nz] == M.size).all())


def is_essential(N, M: FiniteModule | None = None) -> bool:
    """N meets every nonzero cyclic submodule of M."""
    if M is None:
        M = N.ambient
    mask = N.mask if isinstance(N, Submodule) else _mask(M, N)
    hits = mask[M.act] & (M.act != M.zero)
    nz = np.arange(M.size) != M.zero
    return bool(hits.any(axis=1)[nz].all())


def is_essential_in(M: FiniteModule, small: Iterable[int], big: Iterable[int]) -> bool:
    """Whether ``small`` is essential in the submodule ``big`` of M."""
    mask = _mask(M, small)
    B = np.array(sorted(set(big)))
    B = B[B != M.zero]
    if len(B) == 0:
        return True
    rows = M.act[B]
    return bool((mask[rows] & (rows != M.zero)).any(axis=1).all())


def _mask(M: FiniteModule, elements) -> np.ndarray:
    m = np.zeros(M.size, dtype=bool)
    m[list(elements)] = True
    return m


def submodule_module(M: FiniteModule, elements: Iterable[int]) -> tuple[FiniteModule, np.ndarray]:
    """A submodule relabelled as a module in its own right, plus the inclusion."""
    elems = np.array(sorted(set(int(e) for e in elements)))
    index = -np.ones(M.size, dtype=np.int64)
    index[elems] = np.arange(len(elems))
    add = index[M.add[np.ix_(elems, elems)]]
    act = index[M.act[elems, :]]
    if (add < 0).any() or (act < 0).any():
        raise ValueError("element set is not a submodule")
    labels = tuple(M.labels[e] for e in elems) if M.labels else None
    return FiniteModule(M.ring, M.side, _small(add), _small(act), int(index[M.zero]), labels), elems


def quotient_module(M: FiniteModule, N: Iterable[int]) -> tuple[FiniteModule, np.ndarray]:
    Nn = np.array(sorted(set(N.elements if isinstance(N, Submodule) else N)))
    proj = -np.ones(M.size, dtype=np.int64)
    reps = []
    for x in range(M.size):
        if proj[x] < 0:
            proj[M.add[x, Nn]] = len(reps)
            reps.append(x)
    reps = np.array(reps)
    add = proj[M.add[np.ix_(reps, reps)]]
    act = proj[M.act[reps, :]]
    return FiniteModule(M.ring, M.side, _small(add), _small(act), int(proj[M.zero])), proj


def top(M, side: str | None = None) -> tuple[FiniteModule, "ModuleMap"]:
    """M / M·J(R) with its projection."""
    M = as_module(M, side)
    Q, proj = quotient_module(M, radical_submodule(M))
    return Q, ModuleMap(M, Q, proj)


# --------------------------------------------------------------- maps

@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: FiniteModule
    target: FiniteModule
    images: np.ndarray

    @property
    def side(self) -> str:
        return self.source.side

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def is_homomorphism(self) -> bool:
        f = np.asarray(self.images)
        S, T = self.source, self.target
        return bool(
            np.array_equal(f[S.add], T.add[f[:, None], f[None, :]])
            and np.array_equal(f[S.act], T.act[f, :])
        )

    def is_injective(self) -> bool:
        return len(np.unique(self.images)) == self.source.size

    def is_bijective(self) -> bool:
        return self.is_injective() and self.source.size == self.target.size

    def image(self) -> frozenset[int]:
        return frozenset(int(x) for x in np.unique(self.images))


def module_generators(M: FiniteModule) -> list[int]:
    """Greedy generating set: repeatedly add the element enlarging the span most."""
    span = np.array([M.zero])
    gens = []
    inside = np.zeros(M.size, dtype=bool)
    inside[M.zero] = True
    while not inside.all():
        best, best_span = None, None
        for x in np.flatnonzero(~inside):
            cand = _sumset(M, span, np.unique(M.act[x]))
            if best_span is None or len(cand) > len(best_span):
                best, best_span = int(x), cand
                if len(cand) == M.size:
                    break
        gens.append(best)
        span = best_span
        inside[:] = False
        inside[span] = True
    return gens


def _invariants(M: FiniteModule):
    return (
        M.size,
        tuple(sorted(M.additive_orders.tolist())),
        M.annihilator(),
        len(socle(M, check=False)),
        len(radical_submodule(M)),
        tuple(sorted(M.cyclic_sizes.tolist())),
    )


def module_isomorphic(M, N, side: str | None = None, limit: int | None = None) -> ModuleMap | None:
    """An isomorphism M -> N, or None.

    Cheap invariants are compared first; then images of a generating set are
    chosen by backtracking, each choice extended to the generated submodule
    and rejected on the first inconsistency.
    """
    M = as_module(M, side)
    N = as_module(N, side)
    if M.side != N.side:
        raise ValueError("modules on different sides")
    if not (M.ring is N.ring or M.ring.same_tables(N.ring)):
        raise ValueError("modules over different rings")
    limit = config.iso_limit() if limit is None else limit
    if M.size != N.size:
        return None
    if M.size > limit:
        raise SizeLimitExceeded("module isomorphism search", M.size, limit)
    if _invariants(M) != _invariants(N):
        return None
    gens = module_generators(M)
    ann = [M.annihilator(g) for g in gens]
    n_orders = N.additive_orders
    m_orders = M.additive_orders

    def extend(span, phi, g, y):
        E = M.add[span[:, None], M.act[g][None, :]].ravel()
        I = N.add[phi[span][:, None], N.act[y][None, :]].ravel()
        new = phi.copy()
        new[E] = I
        if not np.array_equal(new[E], I):
            return None
        return np.unique(E), new

    def search(k, span, phi):
        if k == len(gens):
            f = ModuleMap(M, N, phi.copy())
            return f if f.is_bijective() and f.is_homomorphism() else None
        g = gens[k]
        used = np.zeros(N.size, dtype=bool)
        used[phi[span]] = True
        for y in range(N.size):
            if used[y] or n_orders[y] != m_orders[g] or N.annihilator(y) != ann[k]:
                continue
            res = extend(span, phi, g, y)
            if res is None:
                continue
            if len(np.unique(res[1][res[0]])) != len(res[0]):
                continue
            out = search(k + 1, *res)
            if out is not None:
                return out
        return None

    phi = -np.ones(M.size, dtype=np.int64)
    phi[M.zero] = N.zero
    return search(0, np.array([M.zero]), phi)


# ------------------------------------------------ character module, injectives

def _additive_generators(add: np.ndarray, zero: int) -> list[int]:
    n = add.shape[0]
    inside = np.zeros(n, dtype=bool)
    inside[zero] = True
    span = np.array([zero])
    gens = []
    orders = np.ones(n, dtype=np.int64)
    for x in range(n):
        y, k = x, 1
        while y != zero:
            y = int(add[y, x])
            k += 1
        orders[x] = k
    while not inside.all():
        cand = np.flatnonzero(~inside)
        g = int(cand[np.argmax(orders[cand])])
        gens.append(g)
        mult = [zero]
        while True:
            nxt = int(add[mult[-1], g])
            if nxt == zero:
                break
            mult.append(nxt)
        span = np.unique(add[span[:, None], np.array(mult)[None, :]])
        inside[:] = False
        inside[span] = True
    return gens


def character_module(R: FiniteRing) -> FiniteBimodule:
    """Hom(R+, Q/Z) with (f·r)(x) = f(rx) and (r·f)(x) = f(xr).

    Character values are stored as residues modulo the additive exponent.
    """
    cached = R.__dict__.get("_character_module")
    if cached is not None:
        return cached
    n = R.size
    e = int(R.additive_orders.max())
    gens = _additive_generators(R.add, R.zero)
    # characters on a growing span, as full value arrays with -1 off-span
    span = np.array([R.zero])
    chars = [np.full(n, -1, dtype=np.int64)]
    chars[0][R.zero] = 0
    for g in gens:
        mult = [R.zero]
        while True:
            nxt = int(R.add[mult[-1], g])
            if nxt in span or nxt == R.zero:
                back = nxt
                break
            mult.append(nxt)
        rel = len(mult)  # least t with t*g in span
        new_chars = []
        for chi in chars:
            need = chi[back]
            for v in range(e):
                if (rel * v - need) % e:
                    continue
                psi = np.full(n, -1, dtype=np.int64)
                for t, tg in enumerate(mult):
                    elems = R.add[span, tg]
                    psi[elems] = (chi[span] + t * v) % e
                new_chars.append(psi)
        chars = new_chars
        span = np.unique(R.add[span[:, None], np.array(mult)[None, :]])
    V = np.array(chars)
    if V.shape != (n, n) or (V < 0).any():
        raise InternalCheckFailed("character enumeration incomplete", witness={"found": len(chars)})
    order = np.lexsort(V.T[::-1])
    V = V[order]
    g_arr = np.array(gens)
    weights = e ** np.arange(len(gens), dtype=np.int64)
    codes = (V[:, g_arr] * weights).sum(axis=1)
    sorter = np.argsort(codes)

    def lookup(vals_on_gens):
        c = (vals_on_gens * weights).sum(axis=-1)
        return sorter[np.searchsorted(codes, c, sorter=sorter)]

    add = lookup((V[:, None, g_arr] + V[None, :, g_arr]) % e)
    right = np.empty((n, n), dtype=np.int64)
    left = np.empty((n, n), dtype=np.int64)
    for r in range(n):
        right[:, r] = lookup(V[:, R.mul[r, g_arr]])
        left[r, :] = lookup(V[:, R.mul[g_arr, r]])
    if n <= 64:
        C = validate_bimodule(R, R, add, left, right, 0, name="character")
    else:
        C = FiniteBimodule(R, R, _small(add), _small(left), _small(right), 0, None, "character")
    R.__dict__["_character_module"] = C
    return C


def _embed_simple(T: FiniteModule, A: FiniteModule, socA: np.ndarray) -> ModuleMap:
    for f in np.flatnonzero(socA):
        if f == A.zero:
            continue
        C = np.unique(A.act[f])
        if len(C) != T.size:
            continue
        sub, incl = submodule_module(A, C)
        iso = module_isomorphic(T, sub)
        if iso is not None:
            return ModuleMap(T, A, incl[iso.images])
    raise EmbeddingNotFound("simple module does not embed in the character module")


def injective_envelope(T: FiniteModule) -> tuple[FiniteModule, ModuleMap]:
    """Injective envelope of a simple module, built inside the character module.

    Starting from the image of T, the submodule X grows by cyclic pieces as
    long as T stays essential; X then has no proper essential extension in an
    injective ambient, so it is an injective envelope.
    """
    if not is_simple(T):
        raise ValueError("injective_envelope expects a simple module")
    C = character_module(T.ring)
    A = C.as_right if T.side == RIGHT else C.as_left
    socA = socle(A, check=False).mask
    emb = _embed_simple(T, A, socA)
    image = np.zeros(A.size, dtype=bool)
    image[emb.images] = True
    X = image.copy()
    t = int(image.sum())
    changed = True
    while changed:
        changed = False
        for x in np.flatnonzero(~X):
            if X[x]:
                continue
            Y = _sumset(A, np.flatnonzero(X), np.unique(A.act[x]))
            if int(socA[Y].sum()) == t:
                X[:] = False
                X[Y] = True
                changed = True
    if not is_essential_in(A, np.flatnonzero(image), np.flatnonzero(X)):
        raise InternalCheckFailed("envelope is not an essential extension")
    E, incl = submodule_module(A, np.flatnonzero(X))
    index = -np.ones(A.size, dtype=np.int64)
    index[incl] = np.arange(len(incl))
    return E, ModuleMap(T, E, index[emb.images])


def simple_decomposition(M: FiniteModule) -> list[frozenset[int]]:
    """Simple submodules whose direct sum is the socle."""
    soc = socle(M, check=False)
    cur = np.array([M.zero])
    inside = np.zeros(M.size, dtype=bool)
    inside[M.zero] = True
    parts = []
    for x in sorted(soc.elements):
        if inside[x]:
            continue
        C = np.unique(M.act[x])
        nz = C[C != M.zero]
        if not (M.cyclic_sizes[nz] == len(C)).all():
            continue
        parts.append(frozenset(int(c) for c in C))
        cur = _sumset(M, cur, C)
        inside[cur] = True
    if set(cur.tolist()) != set(soc.elements):
        raise InternalCheckFailed("socle did not decompose into simple summands")
    return parts


def is_injective(M, side: str | None = None) -> bool:
    """A finite module is injective iff it is as large as the envelope of its socle.

    The socle is essential in M, so M embeds in E(soc M); equality of sizes
    is then equivalent to M being that envelope.
    """
    M = as_module(M, side)
    total = 1
    for part in simple_decomposition(M):
        T, _ = submodule_module(M, part)
        E, _ = injective_envelope(T)
        total *= E.size
        if total > M.size:
            return False
    return total == M.size
