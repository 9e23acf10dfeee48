"""Generators for concrete formal matrix rings and the glueing construction."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .analysis import (
    Permutation,
    check_criterion,
    classify,
    concatenate,
    residue_field_iso,
)
from .errors import AssumptionFailed, BadEnvelope, PrerequisiteFailed, UnresolvedReference
from .formal import FormalMatrixRing, build, corner
from .modules import (
    FiniteBimodule,
    Submodule,
    injective_envelope,
    is_essential,
    is_injective,
    is_simple,
    pullback_bimodule,
    regular_bimodule,
    residue_bimodule,
    socle,
    submodule_module,
    validate_bimodule,
)
from .rings import (
    FiniteRing,
    compose_maps,
    field_isomorphisms,
    frobenius,
    galois_field,
    invert_map,
    prime_power,
    residue_field,
    square_zero_local,
    truncated_polynomial,
    validate_ring,
    zmod,
)

__all__ = [
    "cycle_ring",
    "trivial_extension",
    "support_pattern_ring",
    "serial_quiver_algebra",
    "concatenate",
    "compatible_finite_fields",
    "CompatibleFieldPair",
    "GlueSpec",
    "prepare_glue",
    "glue",
    "glue_general",
    "ring_from_name",
    "twisted_regular_bimodule",
]


# ------------------------------------------------------------ named rings

def twisted_regular_bimodule(F: FiniteRing, twist: int) -> FiniteBimodule:
    """F over itself with the right action precomposed with Frobenius^twist."""
    tau = np.arange(F.size)
    frob = frobenius(F)
    for _ in range(twist):
        tau = frob[tau]
    right = F.mul[:, tau]
    name = "ring" if twist == 0 else f"ring(twist={twist})"
    return validate_bimodule(F, F, F.add, F.mul, right, F.zero, F.labels, name=name)


def trivial_extension(K: FiniteRing, M: FiniteBimodule | None = None, name: str | None = None) -> FiniteRing:
    """K ⋉ M on pairs (a, m): (a, m)(b, n) = (ab, a n + m b)."""
    if M is None:
        M = regular_bimodule(K)
    k, m = K.size, M.size
    a = np.repeat(np.arange(k), m)
    x = np.tile(np.arange(m), k)
    code = lambda r, s: r * m + s
    add = code(K.add[a[:, None], a[None, :]], M.add[x[:, None], x[None, :]])
    mul = code(K.mul[a[:, None], a[None, :]], M.add[M.left[a[:, None], x[None, :]], M.right[x[:, None], a[None, :]]])
    labels = None
    if K.labels and M.labels:
        labels = [f"({K.labels[i]},{M.labels[j]})" for i, j in zip(a, x)]
    if name is None and M.name == "ring":
        name = f"trivext({K.name})"
    return validate_ring(add, mul, code(K.zero, M.zero), code(K.one, M.zero), labels=labels, name=name)


_GF = r"GF\((\d+)\)"


@lru_cache(maxsize=None)
def ring_from_name(name: str) -> FiniteRing:
    """Resolve a generator shorthand such as "Z/4", "GF(4)" or "trivext(GF(2))"."""
    s = name.replace(" ", "")
    m = re.fullmatch(r"Z/(\d+)", s)
    if m:
        n = int(m.group(1))
        if n < 2:
            raise UnresolvedReference(name)
        return zmod(n)
    m = re.fullmatch(_GF, s)
    if m:
        if prime_power(int(m.group(1))) is None:
            raise UnresolvedReference(name)
        return galois_field(int(m.group(1)))
    m = re.fullmatch(_GF + r"\[x\]/\(x\^(\d+)\)", s)
    if m:
        q, k = int(m.group(1)), int(m.group(2))
        if prime_power(q) is None or k < 1:
            raise UnresolvedReference(name)
        return truncated_polynomial(q, k)
    m = re.fullmatch(_GF + r"\[x,y\]/\(x\^2,xy,y\^2\)", s)
    if m:
        q = int(m.group(1))
        if prime_power(q) is None:
            raise UnresolvedReference(name)
        return square_zero_local(q, 2)
    m = re.fullmatch(r"trivext\((.*?)(?:,twist=(\d+))?\)", s)
    if m:
        K = ring_from_name(m.group(1))
        twist = int(m.group(2) or 0)
        if twist:
            if not K.is_field:
                raise UnresolvedReference(name)
            return trivial_extension(K, twisted_regular_bimodule(K, twist), name=f"trivext({K.name},twist={twist})")
        return trivial_extension(K)
    raise UnresolvedReference(name)


# ------------------------------------------------------------ cycle rings

def _two_sided_socle_simple_essential(E: FiniteBimodule) -> bool:
    for side in ("right", "left"):
        M = E.side(side)
        soc = socle(M, check=False)
        sub, _ = submodule_module(M, soc.elements)
        if not is_simple(sub) or not is_essential(soc):
            return False
    return True


def default_envelope(S: FiniteRing) -> FiniteBimodule:
    """Injective envelope of the simple S-module as an S-S bimodule."""
    reg = regular_bimodule(S)
    if is_injective(reg.as_right) and is_injective(reg.as_left):
        return reg
    if not S.is_commutative:
        raise BadEnvelope("no default envelope for a non-commutative, non-self-injective ring")
    from .modules import top

    T, _ = top(reg.as_right)
    E, _ = injective_envelope(T)
    return validate_bimodule(S, S, E.add, np.ascontiguousarray(E.act.T), E.act, E.zero, name="envelope")


def cycle_ring(S: FiniteRing, E: FiniteBimodule | None = None, n: int = 2, name: str | None = None) -> FormalMatrixRing:
    """Order n, every corner S, E on the slots (i, i+1), all other slots zero."""
    if n < 1:
        raise ValueError("n must be positive")
    if not S.is_local:
        raise BadEnvelope("base ring is not local")
    if E is None:
        E = default_envelope(S)
    if not _two_sided_socle_simple_essential(E):
        raise BadEnvelope("E needs a simple essential socle on both sides")
    if n == 1:
        return build([S], [[None]], name=name or f"cycle({S.name},1)")
    bims = [[None] * n for _ in range(n)]
    for i in range(n):
        bims[i][(i + 1) % n] = E
    return build([S] * n, bims, name=name or f"cycle({S.name},{n})")


# ------------------------------------------------------ support patterns

def _residue_embedding(S: FiniteRing, E: FiniteBimodule) -> np.ndarray:
    """Bimodule monomorphism from the residue field into E, hitting the least socle element."""
    res = residue_field(S)
    right = socle(E.as_right, check=False).elements
    left = socle(E.as_left, check=False).elements
    both = sorted((right & left) - {E.zero})
    if not both:
        raise BadEnvelope("E has no two-sided socle element")
    e0 = both[0]
    iota = np.array([int(E.left[res.lifts[k], e0]) for k in range(res.residue_field.size)])
    K = res.residue_field
    for s in range(S.size):
        k = res.projection[s]
        if not (np.array_equal(E.right[iota, s], iota[K.mul[:, k]])
                and np.array_equal(E.left[s, iota], iota[K.mul[k, :]])):
            raise BadEnvelope("residue field does not embed as a bimodule")
    return iota


def support_pattern_ring(n: int, I: Iterable[int], S: FiniteRing, E: FiniteBimodule | None = None,
                         name: str | None = None) -> FormalMatrixRing:
    """Cycle ring with residue fields added on the shifted diagonals +k and 1-k for k in I.

    ``I`` uses the 1-based shift values 2..n-1. The only nonzero proper
    products pair the two shifted copies into E through the residue field.
    """
    I = sorted(set(int(k) for k in I))
    if any(k < 2 or k > n - 1 for k in I):
        raise ValueError("shifts must lie in 2..n-1")
    if E is None:
        E = regular_bimodule(S)
    if not _two_sided_socle_simple_essential(E):
        raise BadEnvelope("E needs a simple essential socle on both sides")
    m = residue_bimodule(S, S)
    K = residue_field(S).residue_field
    iota = _residue_embedding(S, E)
    shifts = sorted({k % n for k in I} | {(1 - k) % n for k in I})
    bims = [[None] * n for _ in range(n)]
    for i in range(n):
        bims[i][(i + 1) % n] = E
        for s in shifts:
            bims[i][(i + s) % n] = m
    prods = {}
    pair = iota[K.mul]
    for i in range(n):
        for s in shifts:
            prods[(i, (i + s) % n, (i + 1) % n)] = pair
    label = ",".join(str(k) for k in I) or "-"
    return build([S] * n, bims, prods, name=name or f"support({S.name},{n},{label})")


# -------------------------------------------------------- serial algebras

def _path_lengths(n: int, bound: int, i: int, j: int) -> list[int]:
    return [t for t in range(bound) if t % n == (i - j) % n]


def _path_elements(q: int, lengths: Sequence[int]) -> list[tuple[int, ...]]:
    return [tuple((x // q ** d) % q for d in range(len(lengths))) for x in range(q ** len(lengths))]


def _path_product(F: FiniteRing, q: int, bound: int, La, Lb, Lc) -> np.ndarray:
    """Table for concatenating paths: lengths add, anything of length >= bound vanishes."""
    A, B = _path_elements(q, La), _path_elements(q, Lb)
    pos = {t: d for d, t in enumerate(Lc)}
    out = np.zeros((len(A), len(B)), dtype=np.int64)
    for x, a in enumerate(A):
        for y, b in enumerate(B):
            coeff = [F.zero] * len(Lc)
            for s, ca in zip(La, a):
                if ca == F.zero:
                    continue
                for t, cb in zip(Lb, b):
                    if s + t < bound and cb != F.zero:
                        d = pos[s + t]
                        coeff[d] = int(F.add[coeff[d], F.mul[ca, cb]])
            out[x, y] = sum(c * q ** d for d, c in enumerate(coeff))
    return out


def serial_quiver_algebra(q: int, n: int, bound: int, name: str | None = None) -> FormalMatrixRing:
    """Path algebra of the cyclic quiver with arrows i+1 -> i, modulo paths of length >= bound.

    Row i is spanned by the paths starting at i; a path of length t from i
    ends at i - t, so slot (i, j) holds the lengths t = i - j mod n.
    Concatenation reads left to right.
    """
    if n < 1 or bound < 1:
        raise ValueError("n and bound must be positive")
    F = galois_field(q)
    L = {(i, j): _path_lengths(n, bound, i, j) for i in range(n) for j in range(n)}
    table = lambda i, j, k: _path_product(F, q, bound, L[(i, j)], L[(j, k)], L[(i, k)])
    depth = len(L[(0, 0)])
    local = truncated_polynomial(q, depth)
    diag_mul = table(0, 0, 0)
    if not np.array_equal(local.mul, diag_mul):
        local = validate_ring(local.add, diag_mul, 0, 1, name=f"paths({q},{n},{bound})")
    rings = [local] * n

    def vec_add(size):
        els = _path_elements(q, range(size))
        index = {e: x for x, e in enumerate(els)}
        return np.array([[index[tuple(int(F.add[u, v]) for u, v in zip(a, b))] for b in els] for a in els])

    bims = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j or not L[(i, j)]:
                continue
            bims[i][j] = validate_bimodule(local, local, vec_add(len(L[(i, j)])), table(i, i, j), table(i, j, j),
                                           0, name=f"paths{len(L[(i, j)])}")
    prods = {}
    for i, j, k in itertools.product(range(n), repeat=3):
        if i != j and j != k and L[(i, j)] and L[(j, k)]:
            prods[(i, j, k)] = table(i, j, k)
    return build(rings, bims, prods, name=name or f"serial({q},{n},{bound})")


# -------------------------------------------------------- compatible fields

@dataclass(frozen=True, eq=False)
class CompatibleFieldPair:
    """K and L with tau: L -> K; K is a K-L bimodule through tau, L an L-K bimodule through tau^-1."""

    K: FiniteRing
    L: FiniteRing
    tau: np.ndarray
    kl: FiniteBimodule
    lk: FiniteBimodule
    twist: int = 0


def compatible_finite_fields(q: int, twist: int = 0) -> CompatibleFieldPair:
    K = galois_field(q)
    L = K
    tau = np.arange(q)
    frob = frobenius(K)
    for _ in range(twist):
        tau = frob[tau]
    tinv = invert_map(tau)
    kl = validate_bimodule(K, L, K.add, K.mul, K.mul[:, tau], K.zero, K.labels, name="K")
    lk = validate_bimodule(L, K, L.add, L.mul, L.mul[:, tinv], L.zero, L.labels, name="L")
    return CompatibleFieldPair(K, L, tau, kl, lk, twist)


# ------------------------------------------------------------------ glue

@dataclass(eq=False)
class _Side:
    ring: FormalMatrixRing
    indices: list[int]
    sigma: Permutation  # on all indices of ring
    field: FiniteRing
    kappa: dict = field(default_factory=dict)  # index -> residue field of R_i -> field
    iota: dict = field(default_factory=dict)  # index -> field -> B_{i, sigma(i)}


@dataclass(eq=False)
class GlueSpec:
    S: FormalMatrixRing
    S2: FormalMatrixRing
    pair: CompatibleFieldPair
    left: _Side
    right: _Side

    @property
    def K(self) -> FiniteRing:
        return self.pair.K

    @property
    def L(self) -> FiniteRing:
        return self.pair.L

    @property
    def sigma(self) -> Permutation:
        return self.left.sigma

    @property
    def sigma2(self) -> Permutation:
        return self.right.sigma


def _nakayama(R: FormalMatrixRing, which: str) -> Permutation:
    rep = classify(R)
    if rep.nakayama is None:
        raise PrerequisiteFailed(f"{which} ring has no Nakayama permutation: {rep.detection_reason}")
    return rep.nakayama


def _is_cycle_union(pi: Permutation, I: Sequence[int]) -> bool:
    return all(pi(i) in I for i in I)


def _residue_sizes(R: FormalMatrixRing, I) -> dict:
    return {i: residue_field(R.rings[i]).residue_field.size for i in I}


def _check_same_fields(R, I, letter) -> FiniteRing:
    sizes = _residue_sizes(R, I)
    if len(set(sizes.values())) != 1:
        raise AssumptionFailed(letter, "residue fields of the corners are not all isomorphic",
                               witness={"residue_sizes": {str(i + 1): s for i, s in sizes.items()}})
    return residue_field(R.rings[I[0]]).residue_field


def _socle_maps(side: _Side, letter: str) -> None:
    """Choose residue identifications kappa_i and socle embeddings iota_i along each cycle."""
    R, I, sigma, F = side.ring, side.indices, side.sigma, side.field
    C = corner(R, I, check=False)
    tau = sigma.restrict(I)
    rep = check_criterion(C, tau)
    for a in range(len(I)):
        if rep.T[a] != rep.T_left[a]:
            raise AssumptionFailed(letter, f"left and right socles of pairing slot ({I[a] + 1},{sigma(I[a]) + 1}) differ",
                                   witness={"right": sorted(rep.T[a]), "left": sorted(rep.T_left[a])})
    for cyc in tau.cycles():
        start = cyc[0]
        res0 = residue_field(C.rings[start]).residue_field
        isos = field_isomorphisms(res0, F, first_only=True)
        if not isos:
            raise AssumptionFailed(letter, "residue field is not isomorphic to the glue field")
        kappa = {start: isos[0]}
        a = start
        for _ in range(len(cyc)):
            phi = residue_field_iso(C, a, tau, rep).images  # residue(a) -> residue(tau(a))
            nxt = compose_maps(kappa[a], invert_map(phi))
            b = tau(a)
            if b == start:
                if not np.array_equal(nxt, kappa[start]):
                    raise AssumptionFailed(letter, "socle bimodule is not the glue field: residue twist around the cycle",
                                           witness={"cycle": [I[x] + 1 for x in cyc], "monodromy": compose_maps(invert_map(kappa[start]), nxt).tolist()})
            else:
                kappa[b] = nxt
            a = b
        for a2, k in kappa.items():
            side.kappa[I[a2]] = k
    for a in range(len(I)):
        i, p = I[a], sigma(I[a])
        B = R.bimodules[i][p]
        res_i = residue_field(R.rings[i])
        m = min(x for x in rep.T_left[a] if x != B.zero)
        kinv = invert_map(side.kappa[i])
        iota = np.array([int(B.left[res_i.lifts[kinv[k]], m]) for k in range(F.size)])
        # iota must intertwine the actions through kappa_i and kappa_p
        kp = side.kappa[p][residue_field(R.rings[p]).projection]
        ki = side.kappa[i][res_i.projection]
        ok = all(np.array_equal(B.right[iota, s], iota[F.mul[:, kp[s]]]) for s in range(R.rings[p].size)) and all(
            np.array_equal(B.left[s, iota], iota[F.mul[ki[s], :]]) for s in range(R.rings[i].size))
        if not ok:
            raise AssumptionFailed(letter, f"socle of slot ({i + 1},{p + 1}) is not the glue field as a bimodule")
        side.iota[i] = iota


def prepare_glue(S: FormalMatrixRing, S2: FormalMatrixRing, pair: CompatibleFieldPair | None = None,
                 I: Sequence[int] | None = None, J: Sequence[int] | None = None) -> GlueSpec:
    """Check conditions (A), (A'), (B), (C), (C'), (D), (D') in that order."""
    sigma = _nakayama(S, "left")
    sigma2 = _nakayama(S2, "right")
    I = sorted(range(S.order) if I is None else set(I))
    J = sorted(range(S2.order) if J is None else set(J))
    if not I or not J:
        raise ValueError("glue index sets must be nonempty")
    if not _is_cycle_union(sigma, I) or not _is_cycle_union(sigma2, J):
        raise ValueError("glue index sets must be unions of cycles")
    K0 = _check_same_fields(S, I, "A")
    L0 = _check_same_fields(S2, J, "A'")
    if pair is None:
        if K0.size != L0.size:
            raise AssumptionFailed("B", "finite residue fields of different sizes are not compatible",
                                   witness={"K": K0.size, "L": L0.size})
        pair = compatible_finite_fields(K0.size, 0)
    if pair.K.size != K0.size or pair.L.size != L0.size:
        raise AssumptionFailed("B", "field pair does not match the residue fields",
                               witness={"K": K0.size, "L": L0.size, "pair": [pair.K.size, pair.L.size]})
    left = _Side(S, I, sigma, pair.K)
    right = _Side(S2, J, sigma2, pair.L)
    _socle_maps(left, "C")
    _socle_maps(right, "C'")
    for side, letter in ((left, "D"), (right, "D'")):
        for i in side.indices:
            if side.sigma(i) == i and side.ring.rings[i].is_field:
                raise AssumptionFailed(letter, f"corner {i + 1} is a fixed point with a simple ring",
                                       witness={"index": i + 1})
    return GlueSpec(S, S2, pair, left, right)


def glue_general(S: FormalMatrixRing, S2: FormalMatrixRing, I=None, J=None,
                 pair: CompatibleFieldPair | None = None, spec: GlueSpec | None = None,
                 name: str | None = None) -> FormalMatrixRing:
    """Block ring with S and S2 on the diagonal and glue fields between the corners I and J."""
    spec = spec or prepare_glue(S, S2, pair, I, J)
    S, S2, pair = spec.S, spec.S2, spec.pair
    n, n2 = S.order, S2.order
    N = n + n2
    I, J = spec.left.indices, spec.right.indices
    rings = list(S.rings) + list(S2.rings)
    bims = [[None] * N for _ in range(N)]
    prods = {}
    for a, b in itertools.product(range(n), repeat=2):
        bims[a][b] = S.bimodules[a][b]
    for a, b in itertools.product(range(n2), repeat=2):
        bims[n + a][n + b] = S2.bimodules[a][b]
    for (a, b, c), t in S.products.items():
        if a != b and b != c:
            prods[(a, b, c)] = t
    for (a, b, c), t in S2.products.items():
        if a != b and b != c:
            prods[(n + a, n + b, n + c)] = t
    ki = {i: spec.left.kappa[i][residue_field(S.rings[i]).projection] for i in I}
    lj = {j: spec.right.kappa[j][residue_field(S2.rings[j]).projection] for j in J}
    for i in I:
        for j in J:
            bims[i][n + j] = pullback_bimodule(pair.kl, S.rings[i], ki[i], S2.rings[j], lj[j], name="K")
            bims[n + j][i] = pullback_bimodule(pair.lk, S2.rings[j], lj[j], S.rings[i], ki[i], name="L")
    for i in I:
        for j in J:
            # a in K, b in L: a·tau(b) embedded into the socle of B_{i, sigma(i)}
            prods[(i, n + j, spec.sigma(i))] = spec.left.iota[i][pair.kl.right]
            prods[(n + j, i, n + spec.sigma2(j))] = spec.right.iota[j][pair.lk.right]
    return build(rings, bims, prods, name=name or f"glue({S.name},{S2.name})")


def glue(spec_or_S, S2: FormalMatrixRing | None = None, pair: CompatibleFieldPair | None = None,
         name: str | None = None) -> FormalMatrixRing:
    """Glue along all indices; accepts a prepared GlueSpec or the two rings."""
    if isinstance(spec_or_S, GlueSpec):
        return glue_general(spec_or_S.S, spec_or_S.S2, spec=spec_or_S, name=name)
    return glue_general(spec_or_S, S2, pair=pair, name=name)
