"""Enumeration harness: exhaustive and seeded-random small formal matrix rings.

Each generated ring is run through the equivalence suites:
``criterion`` compares check_criterion against direct detection for every
permutation, ``essential`` compares the essential-socle conditions against
direct enumeration of cyclic submodules.
"""

from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .analysis import (
    Permutation,
    check_criterion,
    check_essential_criterion,
    detect_nakayama_direct,
    essential_socle_direct,
    ring_hash,
)
from .constructions import ring_from_name
from .errors import AlphaViolation, BalanceViolation, FormalRingError, NotBasic
from .formal import FormalMatrixRing, build
from .modules import FiniteBimodule, _additive_generators, validate_bimodule, zero_bimodule
from .rings import FiniteRing, zmod

SUITES = ("criterion", "essential")


@dataclass(frozen=True)
class EnumerationJob:
    order: int
    carrier_bound: int
    menu: tuple[str, ...]
    mode: str = "exhaustive"  # or "random"
    seed: int | None = None
    count: int = 0
    checks: tuple[str, ...] = SUITES

    def __post_init__(self):
        if self.order < 1 or self.carrier_bound < 1:
            raise ValueError("bounds must be positive")
        if self.mode not in ("exhaustive", "random"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "random" and (self.seed is None or self.count < 0):
            raise ValueError("random mode needs a seed and a nonnegative count")
        if self.mode == "exhaustive" and self.order != 2:
            raise ValueError("exhaustive mode is implemented for order 2")
        unknown = set(self.checks) - set(SUITES)
        if unknown:
            raise ValueError(f"unknown suites {sorted(unknown)}")


@dataclass
class Discrepancy:
    suite: str
    ring_hash: str
    detail: dict
    reproducer: str | None = None


@dataclass
class Census:
    job: EnumerationJob
    generated: int = 0
    rejected: dict = field(default_factory=dict)
    unique: int = 0
    nakayama: int = 0
    no_nakayama: int = 0
    essential_checked: int = 0
    discrepancies: list = field(default_factory=list)
    rings: list = field(default_factory=list)  # (hash, ring) of accepted unique rings
    seconds: float = 0.0

    def reject(self, reason: str) -> None:
        self.rejected[reason] = self.rejected.get(reason, 0) + 1

    @property
    def passed(self) -> bool:
        return not self.discrepancies

    def to_dict(self) -> dict:
        j = self.job
        return {
            "job": {"order": j.order, "carrier_bound": j.carrier_bound, "menu": list(j.menu), "mode": j.mode,
                    "seed": j.seed, "count": j.count, "checks": list(j.checks)},
            "generated": self.generated,
            "rejected": dict(sorted(self.rejected.items())),
            "unique": self.unique,
            "nakayama": self.nakayama,
            "no_nakayama": self.no_nakayama,
            "essential_checked": self.essential_checked,
            "discrepancies": sorted(({"suite": d.suite, "ring_hash": d.ring_hash, "detail": d.detail,
                                      "reproducer": d.reproducer} for d in self.discrepancies),
                                    key=lambda d: (d["suite"], d["ring_hash"])),
            "passed": self.passed,
        }


# ----------------------------------------------------------- small groups

def _klein() -> np.ndarray:
    return np.array([[a ^ b for b in range(4)] for a in range(4)])


@lru_cache(maxsize=None)
def abelian_groups(bound: int) -> tuple[np.ndarray, ...]:
    """Addition tables of the nonzero abelian groups of order <= bound (order <= 8)."""
    if bound > 8:
        raise ValueError("carrier bound above 8 is not supported")
    out = []
    for n in range(2, bound + 1):
        out.append(zmod(n).add)
        if n == 4:
            out.append(_klein())
        if n == 8:
            out.append(np.array([[(a % 4 + b % 4) % 4 + 4 * ((a // 4 + b // 4) % 2) for b in range(8)] for a in range(8)]))
            out.append(np.array([[a ^ b for b in range(8)] for a in range(8)]))
    return tuple(out)


def _coordinates(add: np.ndarray, gens: Sequence[int]) -> np.ndarray:
    """For each element, integer coefficients on ``gens`` expressing it."""
    n = add.shape[0]
    zero = _zero_of(add)
    coords = -np.ones((n, len(gens)), dtype=np.int64)
    coords[zero] = 0
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for s, g in enumerate(gens):
                y = int(add[x, g])
                if coords[y, 0] < 0 and y != zero:
                    coords[y] = coords[x]
                    coords[y, s] += 1
                    nxt.append(y)
        frontier = nxt
    return coords


def _multiples(add: np.ndarray, bound: int) -> np.ndarray:
    """mult[c, v] = c·v for 0 <= c < bound."""
    n = add.shape[0]
    out = np.zeros((bound, n), dtype=np.int64)
    for c in range(1, bound):
        out[c] = add[out[c - 1], np.arange(n)]
    return out


def _zero_of(add: np.ndarray) -> int:
    return int(np.flatnonzero((add == np.arange(add.shape[0])[None, :]).all(axis=1))[0])


@lru_cache(maxsize=None)
def _endomorphisms_cached(key: bytes, n: int) -> tuple[np.ndarray, ...]:
    add = np.frombuffer(key, dtype=np.int64).reshape(n, n)
    return tuple(_endomorphisms(add))


def _endomorphisms(add: np.ndarray) -> list[np.ndarray]:
    n = add.shape[0]
    zero = _zero_of(add)
    gens = _additive_generators(add, zero)
    coords = _coordinates(add, gens)
    mult = _multiples(add, max(1, int(coords.max()) + 1))
    out = []
    for imgs in itertools.product(range(n), repeat=len(gens)):
        f = np.full(n, zero, dtype=np.int64)
        for s, y in enumerate(imgs):
            f = add[f, mult[coords[:, s], y]]
        if np.array_equal(f[add], add[f[:, None], f[None, :]]):
            out.append(f)
    return out


def endomorphisms(add: np.ndarray) -> tuple[np.ndarray, ...]:
    add = np.ascontiguousarray(add, dtype=np.int64)
    return _endomorphisms_cached(add.tobytes(), add.shape[0])


def automorphisms(add: np.ndarray) -> list[np.ndarray]:
    n = add.shape[0]
    return [f for f in endomorphisms(add) if len(set(f.tolist())) == n]


# --------------------------------------------------------- actions, bimodules

def _ring_actions(R: FiniteRing, add: np.ndarray, side: str) -> list[np.ndarray]:
    """Unital actions of R on the group ``add``, as tables act[r, m] = r·m (left) or m·r (right)."""
    ends = endomorphisms(add)
    gens = _additive_generators(R.add, R.zero)
    coords = _coordinates(R.add, gens)
    n = add.shape[0]
    zero = _zero_of(add)
    mult = _multiples(add, max(1, int(coords.max()) + 1))
    out = []
    for imgs in itertools.product(range(len(ends)), repeat=len(gens)):
        act = np.full((R.size, n), zero, dtype=np.int64)
        for s, e in enumerate(imgs):
            act = add[act, mult[coords[:, s]][:, ends[e]]]
        if not np.array_equal(act[R.one], np.arange(n)):
            continue
        if not np.array_equal(act[R.add], add[act[:, None, :], act[None, :, :]]):
            continue
        if _composes(R, act, side):
            out.append(act)
    return out


def _composes(R: FiniteRing, act: np.ndarray, side: str) -> bool:
    """left: (ab)m = a(bm); right: m(ab) = (ma)b. Tables hold one row per ring element."""
    r = np.arange(R.size)
    if side == "left":
        rhs = act[r[:, None, None], act[None, :, :]]
    else:
        rhs = act[r[None, :, None], act[:, None, :]]
    return np.array_equal(act[R.mul], rhs)


def bimodules(L: FiniteRing, R: FiniteRing, bound: int, include_zero: bool = True) -> list[FiniteBimodule]:
    """L-R bimodules with carrier size <= bound, one per isomorphism class of carrier relabelling."""
    return list(_bimodules(L, R, bound, include_zero))


@lru_cache(maxsize=None)
def _bimodules(L: FiniteRing, R: FiniteRing, bound: int, include_zero: bool) -> tuple[FiniteBimodule, ...]:
    out = [zero_bimodule(L, R)] if include_zero else []
    for add in abelian_groups(bound):
        lefts = _ring_actions(L, add, "left")
        rights = _ring_actions(R, add, "right")
        auts = automorphisms(add)
        seen = set()
        lr = np.arange(L.size)[:, None, None], np.arange(R.size)[None, :, None]
        for la, ra in itertools.product(lefts, rights):
            # (l m) r = l (m r), indexed [l, r, m]
            if not np.array_equal(ra[lr[1], la[:, None, :]], la[lr[0], ra[None, :, :]]):
                continue
            key = min(_conj(la, g).tobytes() + _conj(ra, g).tobytes() for g in auts)
            if key in seen:
                continue
            seen.add(key)
            out.append(validate_bimodule(L, R, add, la, np.ascontiguousarray(ra.T), _zero_of(add),
                                         name=f"M{len(out)}"))
    return tuple(out)


def invert(g: np.ndarray) -> np.ndarray:
    inv = np.empty_like(g)
    inv[g] = np.arange(len(g))
    return inv


def _conj(act: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Transport an action table along the group automorphism g."""
    return g[act[:, invert(g)]]


# ----------------------------------------------------------- product tables

def _bilinear_candidates(X: FiniteBimodule, Y: FiniteBimodule, Z: FiniteBimodule) -> list[np.ndarray]:
    """All balanced bimodule maps X x Y -> Z (X: A-B, Y: B-C, Z: A-C)."""
    return list(_bilinear_cached(X, Y, Z))


@lru_cache(maxsize=None)
def _bilinear_cached(X, Y, Z) -> tuple[np.ndarray, ...]:
    zero_table = np.full((X.size, Y.size), Z.zero, dtype=np.int64)
    if X.size == 1 or Y.size == 1 or Z.size == 1:
        return (zero_table,)
    gx = _additive_generators(X.add, X.zero)
    gy = _additive_generators(Y.add, Y.zero)
    cx, cy = _coordinates(X.add, gx), _coordinates(Y.add, gy)
    bound = int(max(cx.max(), cy.max())) + 1
    mult = _multiples(np.asarray(Z.add), bound * bound)
    Zadd = np.asarray(Z.add)
    out = []
    pairs = list(itertools.product(range(len(gx)), range(len(gy))))
    for vals in itertools.product(range(Z.size), repeat=len(pairs)):
        t = zero_table.copy()
        for (s, u), v in zip(pairs, vals):
            t = Zadd[t, mult[cx[:, s][:, None] * cy[:, u][None, :], v]]
        if not np.array_equal(t[X.add, :], Zadd[t[:, None, :], t[None, :, :]]):
            continue
        if not np.array_equal(t[:, Y.add], Zadd[t[:, :, None], t[:, None, :]]):
            continue
        # balance (x b) y = x (b y); linearity (a x) y = a (x y) and x (y c) = (x y) c
        if not np.array_equal(t[X.right, :], t[:, Y.left]):
            continue
        if not np.array_equal(t[X.left, :], Z.left[:, t]):
            continue
        if not np.array_equal(t[:, Y.right], Z.right[t, :]):
            continue
        out.append(t)
    return tuple(out)


# ------------------------------------------------------------ canonical forms

def _canonical_key(rings, grid, prods, n) -> bytes:
    """Minimum encoding over index permutations and carrier automorphisms (order 2 only)."""
    best = None
    for perm in itertools.permutations(range(n)):
        r = [rings[perm[i]] for i in range(n)]
        g = [[grid[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
        p = {(i, j, k): prods[(perm[i], perm[j], perm[k])] for i, j, k in itertools.product(range(n), repeat=3)
             if i != j and j != k}
        slots = [(i, j) for i in range(n) for j in range(n) if i != j]
        auts = [automorphisms(g[i][j].add) if g[i][j].size > 1 else [np.zeros(1, dtype=np.int64)] for i, j in slots]
        head = ("|".join(x.name or "" for x in r) + repr([[x.size for x in row] for row in g])).encode()
        for choice in itertools.product(*auts):
            h = dict(zip(slots, choice))
            parts = [head]
            for (i, j), a in h.items():
                B = g[i][j]
                parts.append(np.asarray(B.add, dtype=np.int64).tobytes())
                parts.append(_conj(np.asarray(B.left), a).tobytes())
                parts.append(_conj(np.asarray(B.right).T, a).tobytes())
                parts.append(b"/")
            for key in sorted(p):
                i, j, k = key
                t = np.asarray(p[key])
                moved = t[invert(h[(i, j)])[:, None], invert(h[(j, k)])[None, :]]
                # a diagonal target has no carrier automorphism
                parts.append((moved if i == k else h[(i, k)][moved]).astype(np.int64).tobytes())
            enc = b"".join(parts)
            if best is None or enc < best:
                best = enc
    return best


def _alpha_precheck(grid, prods, n) -> bool:
    """(x y) z = x (y z) for all consecutive-distinct quadruples, with induced actions."""
    for i, j, k, l in itertools.product(range(n), repeat=4):
        if i == j or j == k or k == l:
            continue
        X, Y, Z = grid[i][j], grid[j][k], grid[k][l]
        if min(X.size, Y.size, Z.size) == 1:
            continue
        xy = prods[(i, j, k)]
        yz = prods[(j, k, l)]
        lhs = _apply(grid, prods, i, k, l, xy[:, :, None], np.arange(Z.size)[None, None, :])
        rhs = _apply(grid, prods, i, j, l, np.arange(X.size)[:, None, None], yz[None, :, :])
        if not np.array_equal(lhs, rhs):
            return False
    return True


def _apply(grid, prods, i, j, k, a, b):
    """Product of a in slot (i, j) with b in slot (j, k), including the induced diagonal cases."""
    if i == j:
        return np.asarray(grid[j][k].left)[a, b]
    if j == k:
        return np.asarray(grid[i][j].right)[a, b]
    return np.asarray(prods[(i, j, k)])[a, b]


# ------------------------------------------------------------------- suites

def _all_permutations(n: int) -> list[Permutation]:
    return [Permutation(p) for p in itertools.permutations(range(n))]


def run_suites(R: FormalMatrixRing, census: Census, checks: Iterable[str], dump_dir: str | None) -> None:
    checks = set(checks)
    h = ring_hash(R)
    det = detect_nakayama_direct(R)
    if det is None:
        census.no_nakayama += 1
    else:
        census.nakayama += 1
    if "criterion" in checks:
        for pi in _all_permutations(R.order):
            crit = check_criterion(R, pi).passed
            if crit != (det == pi):
                census.discrepancies.append(Discrepancy("criterion", h, {
                    "permutation": str(pi), "criterion": crit, "detected": str(det) if det else None},
                    _dump(R, h, dump_dir)))
    if "essential" in checks and det is not None:
        census.essential_checked += 1
        ess = check_essential_criterion(R, det).passed
        direct = essential_socle_direct(R, "right") and essential_socle_direct(R, "left")
        if ess != direct:
            census.discrepancies.append(Discrepancy("essential", h, {"criterion": ess, "direct": direct},
                                                    _dump(R, h, dump_dir)))


def _dump(R: FormalMatrixRing, h: str, dump_dir: str | None) -> str | None:
    if dump_dir is None:
        return None
    from .specio import emit_spec

    os.makedirs(dump_dir, exist_ok=True)
    path = os.path.join(dump_dir, f"discrepancy-{h[:16]}.yaml")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_spec(R))
    return path


def _try_build(rings, grid, prods, census: Census, name: str) -> FormalMatrixRing | None:
    try:
        return build(rings, grid, prods, name=name)
    except AlphaViolation:
        census.reject("alpha")
    except BalanceViolation:
        census.reject("balance")
    except NotBasic:
        census.reject("not-basic")
    return None


# -------------------------------------------------------------- generators

def _proper_triples(n: int):
    return [(i, j, k) for i, j, k in itertools.product(range(n), repeat=3) if i != j and j != k]


def exhaustive_order_two(job: EnumerationJob):
    """Every order-2 ring over the menu; yields (ring, census) once per canonical form."""
    rings_menu = [ring_from_name(m) for m in job.menu]
    census = Census(job)
    seen = set()
    for A, C in itertools.product(rings_menu, repeat=2):
        rings = [A, C]
        for B12 in bimodules(A, C, job.carrier_bound):
            for B21 in bimodules(C, A, job.carrier_bound):
                grid = [[None, B12], [B21, None]]
                full = [[_reg(A), B12], [B21, _reg(C)]]
                c010 = _bilinear_candidates(B12, B21, full[0][0])
                c101 = _bilinear_candidates(B21, B12, full[1][1])
                for t010, t101 in itertools.product(c010, c101):
                    census.generated += 1
                    prods = {(0, 1, 0): t010, (1, 0, 1): t101}
                    if not _alpha_precheck(full, prods, 2):
                        census.reject("alpha")
                        continue
                    key = _canonical_key(rings, full, prods, 2)
                    if key in seen:
                        census.reject("duplicate")
                        continue
                    seen.add(key)
                    R = _try_build(rings, grid, prods, census, f"enum2-{len(seen)}")
                    if R is not None:
                        yield R, census


def random_instances(job: EnumerationJob, max_attempts: int | None = None):
    """Seeded random rings of the job's order; yields (ring, census) until ``count`` built."""
    rng = np.random.default_rng(job.seed)
    rings_menu = [ring_from_name(m) for m in job.menu]
    census = Census(job)
    n = job.order
    built = 0
    attempts = 0
    max_attempts = max_attempts or 200 * max(job.count, 1)
    while built < job.count and attempts < max_attempts and rings_menu:
        attempts += 1
        census.generated += 1
        rings = [rings_menu[int(rng.integers(len(rings_menu)))] for _ in range(n)]
        full = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i == j:
                    full[i][j] = _reg(rings[i])
                else:
                    menu = bimodules(rings[i], rings[j], job.carrier_bound)
                    full[i][j] = menu[0] if rng.random() < 0.3 else menu[int(rng.integers(len(menu)))]
        prods = {}
        for i, j, k in _proper_triples(n):
            cands = _bilinear_candidates(full[i][j], full[j][k], full[i][k])
            prods[(i, j, k)] = cands[0] if (len(cands) == 1 or rng.random() < 0.5) else cands[int(rng.integers(1, len(cands)))]
        if not _alpha_precheck(full, prods, n):
            census.reject("alpha")
            continue
        grid = [[None if i == j else full[i][j] for j in range(n)] for i in range(n)]
        R = _try_build(rings, grid, prods, census, f"rand{n}-{job.seed}-{built}")
        if R is not None:
            built += 1
            yield R, census


@lru_cache(maxsize=None)
def _reg(R: FiniteRing) -> FiniteBimodule:
    from .modules import regular_bimodule

    return regular_bimodule(R)


def run_job(job: EnumerationJob, dump_dir: str | None = None, keep_rings: bool = False) -> Census:
    start = time.perf_counter()
    census = Census(job)
    if job.menu:
        gen = exhaustive_order_two(job) if job.mode == "exhaustive" else random_instances(job)
        for R, c in gen:
            census = c
            census.unique += 1
            if keep_rings:
                census.rings.append(R)
            run_suites(R, census, job.checks, dump_dir)
    census.seconds = time.perf_counter() - start
    return census
