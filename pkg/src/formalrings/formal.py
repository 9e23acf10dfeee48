"""Formal matrix rings over local diagonal rings.

A ring of order n is stored as its diagonal rings ``R_i``, coordinate
bimodules ``B_ij`` (with ``B_ii`` the regular bimodule) and product tables
``phi[i, j, k]: B_ij x B_jk -> B_ik`` for every triple. Triples with
``i == j`` or ``j == k`` are induced by the bimodule actions; the remaining
"proper" tables are the data. Indices are 0-based internally.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import config
from .errors import AlphaViolation, BalanceViolation, InternalCheckFailed, NotBasic, NotLocal, SizeLimitExceeded
from .modules import (
    FiniteBimodule,
    FiniteModule,
    opposite_bimodule,
    regular_bimodule,
    validate_bimodule,
    zero_bimodule,
)
from .rings import FiniteRing, opposite, validate_ring

_EXHAUSTIVE = 1 << 22
_SAMPLES = 10_000
_SPOT_CHECKS = 300


def _small(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    return a.astype(np.int32 if a.size and a.max() > 32000 else np.int16)


@dataclass(frozen=True, eq=False)
class FormalMatrixRing:
    rings: tuple[FiniteRing, ...]
    bimodules: tuple[tuple[FiniteBimodule, ...], ...]
    products: Mapping[tuple[int, int, int], np.ndarray]
    name: str | None = None

    @property
    def order(self) -> int:
        return len(self.rings)

    def __repr__(self) -> str:
        return f"<FormalMatrixRing {self.name or ''} order={self.order} sizes={self.sizes}>"

    def B(self, i: int, j: int) -> FiniteBimodule:
        return self.bimodules[i][j]

    def phi(self, i: int, j: int, k: int) -> np.ndarray:
        return self.products[(i, j, k)]

    @cached_property
    def sizes(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(b.size for b in row) for row in self.bimodules)

    def is_zero_slot(self, i: int, j: int) -> bool:
        return self.bimodules[i][j].size == 1

    @cached_property
    def support(self) -> frozenset[tuple[int, int]]:
        n = self.order
        return frozenset((i, j) for i in range(n) for j in range(n) if self.bimodules[i][j].size > 1)

    def row_size(self, i: int) -> int:
        return int(np.prod([b.size for b in self.bimodules[i]], dtype=object))

    @cached_property
    def total_size(self) -> int:
        return int(np.prod([b.size for row in self.bimodules for b in row], dtype=object))

    @property
    def is_trivial(self) -> bool:
        """All proper products vanish."""
        for (i, j, k), t in self.products.items():
            if i != j and j != k and (t != self.bimodules[i][k].zero).any():
                return False
        return True

    def same_tables(self, other: "FormalMatrixRing") -> bool:
        if self.order != other.order:
            return False
        n = self.order
        if not all(self.rings[i].same_tables(other.rings[i]) for i in range(n)):
            return False
        if not all(self.bimodules[i][j].same_tables(other.bimodules[i][j]) for i in range(n) for j in range(n)):
            return False
        return all(np.array_equal(self.products[t], other.products[t]) for t in self.products)

    # element helpers
    def zero_element(self) -> "MatrixElement":
        n = self.order
        return MatrixElement(self, tuple(tuple(self.bimodules[i][j].zero for j in range(n)) for i in range(n)))

    def one_element(self) -> "MatrixElement":
        return sum_elements(canonical_idempotents(self))

    def E(self, i: int, j: int, x: int) -> "MatrixElement":
        n = self.order
        rows = [[self.bimodules[a][b].zero for b in range(n)] for a in range(n)]
        rows[i][j] = int(x)
        return MatrixElement(self, tuple(tuple(r) for r in rows))


def _induced_table(rings, bimodules, i, j, k) -> np.ndarray:
    if i == j == k:
        return rings[i].mul
    if i == j:
        return bimodules[i][k].left
    return bimodules[i][j].right


def _zero_table(bimodules, i, j, k) -> np.ndarray:
    return np.full((bimodules[i][j].size, bimodules[j][k].size), bimodules[i][k].zero, dtype=np.int16)


def _first(bad: np.ndarray) -> tuple[int, ...]:
    return tuple(int(x) for x in np.argwhere(bad)[0])


def _check_bilinear(rings, bimodules, t, i, j, k, rng) -> None:
    A, B, C = bimodules[i][j], bimodules[j][k], bimodules[i][k]
    a, b = A.size, B.size
    if t.shape != (a, b):
        raise BalanceViolation((i, j, k), "table shape", (a, b))
    if t.min() < 0 or t.max() >= C.size:
        raise BalanceViolation((i, j, k), "table range", (int(t.min()), int(t.max())))
    Ri, Rj, Rk = rings[i], rings[j], rings[k]
    ar_b = np.arange(b)
    ar_a = np.arange(a)
    checks = [
        # (x + x') y = x y + x' y
        ("additive in the left factor", a * a * b,
         lambda: (t[A.add[:, :, None], ar_b[None, None, :]], C.add[t[:, None, :], t[None, :, :]])),
        ("additive in the right factor", a * b * b,
         lambda: (t[ar_a[:, None, None], B.add[None, :, :]], C.add[t[:, :, None], t[:, None, :]])),
        ("left linear", Ri.size * a * b,
         lambda: (t[A.left[:, :, None], ar_b[None, None, :]], C.left[np.arange(Ri.size)[:, None, None], t[None, :, :]])),
        ("right linear", a * b * Rk.size,
         lambda: (t[ar_a[:, None, None], B.right[None, :, :]], C.right[t[:, :, None], np.arange(Rk.size)[None, None, :]])),
        ("balanced", a * Rj.size * b,
         lambda: (t[A.right[:, :, None], ar_b[None, None, :]], t[ar_a[:, None, None], B.left[None, :, :]])),
    ]
    for law, volume, fn in checks:
        if volume <= _EXHAUSTIVE:
            lhs, rhs = fn()
            bad = lhs != rhs
            if bad.any():
                raise BalanceViolation((i, j, k), law, _first(bad))
        else:
            _sample_bilinear(rings, bimodules, t, i, j, k, law, rng)


def _sample_bilinear(rings, bimodules, t, i, j, k, law, rng) -> None:
    A, B, C = bimodules[i][j], bimodules[j][k], bimodules[i][k]
    x = rng.integers(0, A.size, _SAMPLES)
    y = rng.integers(0, B.size, _SAMPLES)
    if law == "additive in the left factor":
        x2 = rng.integers(0, A.size, _SAMPLES)
        lhs, rhs, w = t[A.add[x, x2], y], C.add[t[x, y], t[x2, y]], (x, x2, y)
    elif law == "additive in the right factor":
        y2 = rng.integers(0, B.size, _SAMPLES)
        lhs, rhs, w = t[x, B.add[y, y2]], C.add[t[x, y], t[x, y2]], (x, y, y2)
    elif law == "left linear":
        r = rng.integers(0, rings[i].size, _SAMPLES)
        lhs, rhs, w = t[A.left[r, x], y], C.left[r, t[x, y]], (r, x, y)
    elif law == "right linear":
        s = rng.integers(0, rings[k].size, _SAMPLES)
        lhs, rhs, w = t[x, B.right[y, s]], C.right[t[x, y], s], (x, y, s)
    else:
        r = rng.integers(0, rings[j].size, _SAMPLES)
        lhs, rhs, w = t[A.right[x, r], y], t[x, B.left[r, y]], (x, r, y)
    bad = lhs != rhs
    if bad.any():
        p = int(np.flatnonzero(bad)[0])
        raise BalanceViolation((i, j, k), law, tuple(int(v[p]) for v in w))


def _check_alpha(bimodules, products, i, j, k, l, rng) -> None:
    """(x y) z = x (y z) for x in B_ij, y in B_jk, z in B_kl."""
    p_ijk, p_ikl = products[(i, j, k)], products[(i, k, l)]
    p_jkl, p_ijl = products[(j, k, l)], products[(i, j, l)]
    a, b, c = bimodules[i][j].size, bimodules[j][k].size, bimodules[k][l].size
    if a * b * c <= _EXHAUSTIVE:
        lhs = p_ikl[p_ijk[:, :, None], np.arange(c)[None, None, :]]
        rhs = p_ijl[np.arange(a)[:, None, None], p_jkl[None, :, :]]
        bad = lhs != rhs
        if bad.any():
            raise AlphaViolation((i, j, k, l), _first(bad))
    else:
        x = rng.integers(0, a, _SAMPLES)
        y = rng.integers(0, b, _SAMPLES)
        z = rng.integers(0, c, _SAMPLES)
        bad = p_ikl[p_ijk[x, y], z] != p_ijl[x, p_jkl[y, z]]
        if bad.any():
            p = int(np.flatnonzero(bad)[0])
            raise AlphaViolation((i, j, k, l), (int(x[p]), int(y[p]), int(z[p])))


def build(
    rings: Sequence[FiniteRing],
    bimodules: Sequence[Sequence[FiniteBimodule | None]],
    products: Mapping[tuple[int, int, int], np.ndarray] | None = None,
    name: str | None = None,
    check: bool = True,
) -> FormalMatrixRing:
    """Assemble and validate a formal matrix ring.

    ``bimodules[i][j]`` may be None for a zero slot (diagonal slots default to
    the regular bimodule). Proper products missing from ``products`` are zero.
    """
    n = len(rings)
    if n < 1:
        raise ValueError("order must be positive")
    rings = tuple(rings)
    grid = []
    for i in range(n):
        row = []
        for j in range(n):
            b = bimodules[i][j] if bimodules is not None else None
            if b is None:
                b = regular_bimodule(rings[i]) if i == j else zero_bimodule(rings[i], rings[j])
            row.append(b)
        grid.append(tuple(row))
    grid = tuple(grid)
    products = dict(products or {})
    table = {}
    for i, j, k in itertools.product(range(n), repeat=3):
        if i == j or j == k:
            table[(i, j, k)] = _induced_table(rings, grid, i, j, k)
        elif (i, j, k) in products and products[(i, j, k)] is not None:
            table[(i, j, k)] = _small(products[(i, j, k)])
        else:
            table[(i, j, k)] = _zero_table(grid, i, j, k)
    R = FormalMatrixRing(rings, grid, table, name)
    if check:
        validate(R)
    return R


def validate(R: FormalMatrixRing) -> None:
    n = R.order
    rng = np.random.default_rng(0)
    for i, Ri in enumerate(R.rings):
        if Ri.is_zero_ring or not Ri.is_local:
            raise NotLocal(i, witness={"ring": Ri.name, "units": sorted(Ri.units)})
    for i in range(n):
        for j in range(n):
            B = R.bimodules[i][j]
            if not (B.left_ring.same_tables(R.rings[i]) and B.right_ring.same_tables(R.rings[j])):
                raise BalanceViolation((i, j, j), "bimodule rings match the diagonal", (i, j))
            if i == j:
                if not B.same_tables(regular_bimodule(R.rings[i])):
                    raise BalanceViolation((i, i, i), "diagonal slot is the regular bimodule", (i,))
            elif B.size > 1:
                validate_bimodule(B.left_ring, B.right_ring, B.add, B.left, B.right, B.zero)
    for (i, j, k), t in R.products.items():
        if i != j and j != k:
            _check_bilinear(R.rings, R.bimodules, t, i, j, k, rng)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        if i != j and j != k and k != l:
            if min(R.bimodules[i][j].size, R.bimodules[j][k].size, R.bimodules[k][l].size) > 1:
                _check_alpha(R.bimodules, R.products, i, j, k, l, rng)
    for i in range(n):
        J = R.rings[i].radical_mask
        for j in range(n):
            if j == i:
                continue
            img = R.products[(i, j, i)]
            bad = ~J[img]
            if bad.any():
                a, b = _first(bad)
                raise NotBasic(i, j, (a, b))
    _spot_check_elements(R, rng)


def _spot_check_elements(R: FormalMatrixRing, rng) -> None:
    """Random matrix triples: associativity and distributivity of the assembled ring."""
    for _ in range(_SPOT_CHECKS if R.order > 1 else 0):
        x, y, z = (random_element(R, rng) for _ in range(3))
        if (x * y) * z != x * (y * z):
            raise InternalCheckFailed("matrix multiplication not associative", witness=[x.entries, y.entries, z.entries])
        if x * (y + z) != x * y + x * z or (x + y) * z != x * z + y * z:
            raise InternalCheckFailed("matrix multiplication not distributive", witness=[x.entries, y.entries, z.entries])


# ------------------------------------------------------------- elements

@dataclass(frozen=True)
class MatrixElement:
    parent: FormalMatrixRing = field(compare=False, repr=False)
    entries: tuple[tuple[int, ...], ...]

    def __add__(self, other: "MatrixElement") -> "MatrixElement":
        R = self.parent
        n = R.order
        return MatrixElement(R, tuple(
            tuple(int(R.bimodules[i][j].add[self.entries[i][j], other.entries[i][j]]) for j in range(n))
            for i in range(n)
        ))

    def __mul__(self, other: "MatrixElement") -> "MatrixElement":
        R = self.parent
        n = R.order
        rows = []
        for i in range(n):
            row = []
            for k in range(n):
                C = R.bimodules[i][k]
                acc = C.zero
                for j in range(n):
                    acc = int(C.add[acc, R.products[(i, j, k)][self.entries[i][j], other.entries[j][k]]])
                row.append(acc)
            rows.append(tuple(row))
        return MatrixElement(R, tuple(rows))

    def __neg__(self) -> "MatrixElement":
        R = self.parent
        n = R.order
        return MatrixElement(R, tuple(tuple(int(R.bimodules[i][j].neg[self.entries[i][j]]) for j in range(n)) for i in range(n)))

    @property
    def is_zero(self) -> bool:
        R = self.parent
        return all(self.entries[i][j] == R.bimodules[i][j].zero for i in range(R.order) for j in range(R.order))


def add(x: MatrixElement, y: MatrixElement) -> MatrixElement:
    return x + y


def multiply(x: MatrixElement, y: MatrixElement) -> MatrixElement:
    return x * y


def sum_elements(xs: Iterable[MatrixElement]) -> MatrixElement:
    xs = list(xs)
    out = xs[0]
    for x in xs[1:]:
        out = out + x
    return out


def random_element(R: FormalMatrixRing, rng) -> MatrixElement:
    n = R.order
    return MatrixElement(R, tuple(tuple(int(rng.integers(0, R.bimodules[i][j].size)) for j in range(n)) for i in range(n)))


def canonical_idempotents(R: FormalMatrixRing) -> list[MatrixElement]:
    return [R.E(i, i, R.rings[i].one) for i in range(R.order)]


# ------------------------------------------------------------ row modules

@dataclass(frozen=True, eq=False)
class RowModule:
    """A right module (M_1, ..., M_n) with multiplication tables maps[j, k]: M_j x B_jk -> M_k."""

    parent: FormalMatrixRing
    components: tuple[FiniteModule, ...]
    maps: Mapping[tuple[int, int], np.ndarray]

    @property
    def order(self) -> int:
        return len(self.components)

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(M.size for M in self.components)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims, dtype=object))

    @cached_property
    def strides(self) -> np.ndarray:
        out = np.ones(self.order, dtype=np.int64)
        for j in range(self.order - 2, -1, -1):
            out[j] = out[j + 1] * self.dims[j + 1]
        return out

    def encode(self, x: Sequence[int]) -> int:
        return int(np.dot(np.asarray(x, dtype=np.int64), self.strides))

    def decode_all(self) -> np.ndarray:
        """All elements as an (size, n) array of coordinates, in code order."""
        codes = np.arange(self.size, dtype=np.int64)
        return (codes[:, None] // self.strides[None, :]) % np.array(self.dims)[None, :]

    @cached_property
    def zero(self) -> tuple[int, ...]:
        return tuple(M.zero for M in self.components)

    # cyclic submodules through interned coordinate subgroups
    @cached_property
    def _groups(self) -> list[dict]:
        return [dict() for _ in range(self.order)]

    @cached_property
    def _group_list(self) -> list[list[np.ndarray]]:
        return [[] for _ in range(self.order)]

    def _intern(self, k: int, elems) -> int:
        key = frozenset(int(e) for e in elems)
        d = self._groups[k]
        if key not in d:
            d[key] = len(self._group_list[k])
            self._group_list[k].append(np.array(sorted(key), dtype=np.int64))
        return d[key]

    @cached_property
    def _sum_memo(self) -> dict:
        return {}

    def _gsum(self, k: int, g: int, h: int) -> int:
        if g == h:
            return g
        key = (k, min(g, h), max(g, h))
        memo = self._sum_memo
        if key not in memo:
            A, B = self._group_list[k][g], self._group_list[k][h]
            M = self.components[k]
            memo[key] = self._intern(k, np.unique(M.add[A[:, None], B[None, :]]))
        return memo[key]

    @cached_property
    def generator_groups(self) -> list[list[np.ndarray]]:
        """generator_groups[j][k][a]: id of the subgroup a·B_jk of M_k."""
        n = self.order
        out = []
        for j in range(n):
            per_k = []
            for k in range(n):
                t = self.maps[(j, k)]
                ids = np.array([self._intern(k, np.unique(t[a])) for a in range(t.shape[0])], dtype=np.int64)
                per_k.append(ids)
            out.append(per_k)
        return out

    @cached_property
    def zero_groups(self) -> tuple[int, ...]:
        return tuple(self._intern(k, [self.components[k].zero]) for k in range(self.order))

    def cyclic_ids(self, x: Sequence[int]) -> tuple[int, ...]:
        gg = self.generator_groups
        out = []
        for k in range(self.order):
            acc = gg[0][k][x[0]]
            for j in range(1, self.order):
                acc = self._gsum(k, acc, gg[j][k][x[j]])
            out.append(int(acc))
        return tuple(out)

    def group(self, k: int, gid: int) -> np.ndarray:
        return self._group_list[k][gid]

    def cyclic(self, x: Sequence[int]) -> "RowSubmodule":
        ids = self.cyclic_ids(x)
        return RowSubmodule(self, tuple(frozenset(int(e) for e in self.group(k, g)) for k, g in enumerate(ids)))

    def submodule(self, parts: Sequence[Iterable[int]]) -> "RowSubmodule":
        return RowSubmodule(self, tuple(frozenset(int(e) for e in p) for p in parts))

    def zero_submodule(self) -> "RowSubmodule":
        return self.submodule([[z] for z in self.zero])

    def full_submodule(self) -> "RowSubmodule":
        return self.submodule([range(d) for d in self.dims])


@dataclass(frozen=True, eq=False)
class RowSubmodule:
    parent: RowModule
    parts: tuple[frozenset[int], ...]

    @property
    def size(self) -> int:
        return int(np.prod([len(p) for p in self.parts], dtype=object))

    @property
    def is_zero(self) -> bool:
        return all(len(p) == 1 for p in self.parts)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, p in enumerate(self.parts) if len(p) > 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, RowSubmodule) and self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __repr__(self) -> str:
        return "RowSubmodule(" + ", ".join(str(sorted(p)) for p in self.parts) + ")"

    def meets_nontrivially(self, other: "RowSubmodule") -> bool:
        return any(len(a & b) > 1 for a, b in zip(self.parts, other.parts))

    def is_submodule(self) -> bool:
        """Each part is an additive subgroup and N_j·B_jk lands in N_k."""
        M = self.parent
        for j, part in enumerate(self.parts):
            P = np.array(sorted(part))
            mask = np.zeros(M.components[j].size, dtype=bool)
            mask[P] = True
            if not mask[M.components[j].add[np.ix_(P, P)]].all():
                return False
        for (j, k), t in M.maps.items():
            P = np.array(sorted(self.parts[j]))
            mask = np.zeros(M.components[k].size, dtype=bool)
            mask[np.array(sorted(self.parts[k]))] = True
            if not mask[t[P]].all():
                return False
        return True

    def plus(self, other: "RowSubmodule") -> "RowSubmodule":
        M = self.parent
        parts = []
        for k, (a, b) in enumerate(zip(self.parts, other.parts)):
            A, B = np.array(sorted(a)), np.array(sorted(b))
            parts.append(frozenset(int(e) for e in np.unique(M.components[k].add[A[:, None], B[None, :]])))
        return RowSubmodule(M, tuple(parts))


def row_module_of_idempotent(R: FormalMatrixRing, i: int) -> RowModule:
    """e_i R = (B_i1, ..., B_in) with the products out of row i as multiplication."""
    cache = R.__dict__.setdefault("_row_modules", {})
    if i not in cache:
        n = R.order
        comps = tuple(R.bimodules[i][j].as_right for j in range(n))
        maps = {(j, k): R.products[(i, j, k)] for j in range(n) for k in range(n)}
        cache[i] = RowModule(R, comps, maps)
    return cache[i]


def check_beta(M: RowModule, limit: int = _EXHAUSTIVE) -> tuple[int, ...] | None:
    """First (j, k, l, m, b, c) where f_kl(f_jk(m, b), c) != f_jl(m, b c), else None."""
    R = M.parent
    n = M.order
    for j, k, l in itertools.product(range(n), repeat=3):
        f_jk, f_kl, f_jl = M.maps[(j, k)], M.maps[(k, l)], M.maps[(j, l)]
        p = R.products[(j, k, l)]
        a, b, c = f_jk.shape[0], f_jk.shape[1], f_kl.shape[1]
        if a * b * c > limit:
            continue
        lhs = f_kl[f_jk[:, :, None], np.arange(c)[None, None, :]]
        rhs = f_jl[np.arange(a)[:, None, None], p[None, :, :]]
        bad = lhs != rhs
        if bad.any():
            return (j, k, l) + _first(bad)
    return None


# --------------------------------------------------------- corners, blocks

def corner(R: FormalMatrixRing, I: Iterable[int], check: bool = True, name: str | None = None) -> FormalMatrixRing:
    """e R e for e the sum of canonical idempotents indexed by I (0-based)."""
    I = sorted(set(int(i) for i in I))
    if not I or I[0] < 0 or I[-1] >= R.order:
        raise ValueError(f"bad index set {I}")
    rings = [R.rings[i] for i in I]
    bims = [[R.bimodules[i][j] for j in I] for i in I]
    prods = {}
    for a, b, c in itertools.product(range(len(I)), repeat=3):
        if a != b and b != c:
            prods[(a, b, c)] = R.products[(I[a], I[b], I[c])]
    return build(rings, bims, prods, name=name or R.name, check=check)


def central_idempotent_blocks(R: FormalMatrixRing) -> list[list[int]]:
    """Finest partition of indices with zero bimodules between classes."""
    n = R.order
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in R.support:
        parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def is_indecomposable(R: FormalMatrixRing) -> bool:
    return len(central_idempotent_blocks(R)) == 1


def trivial_formal_ring(rings: Sequence[FiniteRing], bimodules, name: str | None = None) -> FormalMatrixRing:
    return build(rings, bimodules, {}, name=name)


def opposite_formal(R: FormalMatrixRing) -> FormalMatrixRing:
    """R^op: diagonal R_i^op, slot (i, j) holds B_ji, products transposed."""
    cached = R.__dict__.get("_opposite")
    if cached is not None:
        return cached
    n = R.order
    rings = tuple(opposite(Ri) for Ri in R.rings)
    bims = tuple(
        tuple(regular_bimodule(rings[i]) if i == j else opposite_bimodule(R.bimodules[j][i]) for j in range(n))
        for i in range(n)
    )
    prods = {}
    for i, j, k in itertools.product(range(n), repeat=3):
        if i == j or j == k:
            prods[(i, j, k)] = _induced_table(rings, bims, i, j, k)
        else:
            prods[(i, j, k)] = np.ascontiguousarray(R.products[(k, j, i)].T)
    op = FormalMatrixRing(rings, bims, prods, f"op({R.name})" if R.name else None)
    op.__dict__["_opposite"] = R
    R.__dict__["_opposite"] = op
    return op


# --------------------------------------------------------------- flatten

def flatten(R: FormalMatrixRing, limit: int | None = None, check: bool = True) -> FiniteRing:
    """The explicit ring on entry tuples, entries ordered row-major."""
    limit = config.flatten_limit() if limit is None else limit
    size = R.total_size
    if size > limit:
        raise SizeLimitExceeded("flattened ring", size, limit)
    n = R.order
    slots = [(i, j) for i in range(n) for j in range(n)]
    dims = np.array([R.bimodules[i][j].size for i, j in slots], dtype=np.int64)
    strides = np.ones(len(slots), dtype=np.int64)
    for s in range(len(slots) - 2, -1, -1):
        strides[s] = strides[s + 1] * dims[s + 1]
    codes = np.arange(size, dtype=np.int64)
    digits = (codes[:, None] // strides[None, :]) % dims[None, :]
    add = np.zeros((size, size), dtype=np.int64)
    mul = np.zeros((size, size), dtype=np.int64)
    pos = {slot: s for s, slot in enumerate(slots)}
    chunk = max(1, (1 << 22) // max(1, size))
    for start in range(0, size, chunk):
        X = digits[start:start + chunk]
        for s, (i, j) in enumerate(slots):
            B = R.bimodules[i][j]
            add[start:start + chunk] += B.add[X[:, s][:, None], digits[:, s][None, :]].astype(np.int64) * strides[s]
            acc = np.full((len(X), size), B.zero, dtype=np.int64)
            for m in range(n):
                t = R.products[(i, m, j)]
                term = t[X[:, pos[(i, m)]][:, None], digits[:, pos[(m, j)]][None, :]]
                acc = B.add[acc, term]
            mul[start:start + chunk] += acc * strides[s]
    zero = R.zero_element()
    one = R.one_element()
    enc = lambda x: int(sum(x.entries[i][j] * strides[pos[(i, j)]] for i, j in slots))
    name = f"flat({R.name})" if R.name else None
    if check:
        return validate_ring(add, mul, enc(zero), enc(one), name=name)
    return FiniteRing(_small(add), _small(mul), enc(zero), enc(one), None, name)


def element_code(R: FormalMatrixRing, x: MatrixElement) -> int:
    """Index of a matrix element in ``flatten(R)``."""
    n = R.order
    code = 0
    for i in range(n):
        for j in range(n):
            code = code * R.bimodules[i][j].size + x.entries[i][j]
    return code
