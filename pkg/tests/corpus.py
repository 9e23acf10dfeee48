"""Shared ring corpus for the test suites."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from formalrings.constructions import (
    cycle_ring,
    glue,
    ring_from_name,
    serial_quiver_algebra,
    support_pattern_ring,
)
from formalrings.formal import build
from formalrings.modules import regular_bimodule, residue_bimodule, validate_bimodule
from formalrings.rings import galois_field, square_zero_local, zmod

LOCAL_NAMES = [
    "GF(2)",
    "GF(3)",
    "GF(4)",
    "Z/4",
    "Z/9",
    "GF(2)[x]/(x^2)",
    "GF(2)[x]/(x^3)",
    "trivext(GF(2))",
    "trivext(GF(3))",
    "trivext(GF(4))",
]


def single(name: str):
    S = ring_from_name(name)
    return build([S], [[None]], name=name)


def diagonal(*names: str):
    rings = [ring_from_name(n) for n in names]
    return build(rings, [[None] * len(rings) for _ in rings], name="x".join(names))


def support_cases():
    for n in (3, 4, 5):
        for r in range(0, n - 1):
            for I in itertools.combinations(range(2, n), r):
                yield n, I


@lru_cache(maxsize=None)
def frobenius_corpus() -> tuple:
    """(label, ring) pairs that carry a Nakayama permutation."""
    Z4, P = zmod(4), ring_from_name("GF(2)[x]/(x^2)")
    te = ring_from_name("trivext(GF(2))")
    out = [(f"single {n}", single(n)) for n in LOCAL_NAMES]
    out += [
        ("cycle Z/4 n=2", cycle_ring(Z4, n=2)),
        ("cycle Z/4 n=3", cycle_ring(Z4, n=3)),
        ("cycle F2[x]/x^2 n=2", cycle_ring(P, n=2)),
        ("cycle F2[x]/x^2 n=3", cycle_ring(P, n=3)),
        ("cycle GF(2) n=2", cycle_ring(galois_field(2), n=2)),
        ("cycle GF(2) n=4", cycle_ring(galois_field(2), n=4)),
        ("cycle trivext(GF(2)) n=2", cycle_ring(te, n=2)),
        ("cycle twisted trivext(GF(4)) n=2", cycle_ring(ring_from_name("trivext(GF(4),twist=1)"), n=2)),
        ("serial 2,1,2", serial_quiver_algebra(2, 1, 2)),
        ("serial 2,2,3", serial_quiver_algebra(2, 2, 3)),
        ("serial 2,2,4", serial_quiver_algebra(2, 2, 4)),
        ("serial 2,3,3", serial_quiver_algebra(2, 3, 3)),
        ("serial 2,3,6", serial_quiver_algebra(2, 3, 6)),
        ("serial 3,2,4", serial_quiver_algebra(3, 2, 4)),
        ("product GF(2) x trivext(GF(2))", diagonal("GF(2)", "trivext(GF(2))")),
        ("product Z/4 x GF(4)", diagonal("Z/4", "GF(4)")),
    ]
    out += [(f"support n={n} I={list(I)}", support_pattern_ring(n, I, Z4)) for n, I in support_cases()]
    out += [(f"glue {a} + {b}", glue(x, y)) for a, b, x, y in glue_pairs()]
    return tuple(out)


@lru_cache(maxsize=None)
def glue_pairs() -> tuple:
    Z4, P = zmod(4), ring_from_name("GF(2)[x]/(x^2)")
    te, te2 = single("trivext(GF(2))"), single("trivext(GF(2))")
    return (
        ("trivext(GF(2))", "trivext(GF(2))", te, te2),
        ("cycle Z/4 n=2", "trivext(GF(2))", cycle_ring(Z4, n=2), te),
        ("cycle Z/4 n=3", "cycle Z/4 n=3", cycle_ring(Z4, n=3), cycle_ring(Z4, n=3)),
        ("cycle F2[x]/x^2 n=2", "serial 2,2,4", cycle_ring(P, n=2), serial_quiver_algebra(2, 2, 4)),
        ("serial 2,3,6", "cycle Z/4 n=2", serial_quiver_algebra(2, 3, 6), cycle_ring(Z4, n=2)),
        ("trivext(GF(4))", "cycle trivext(GF(4)) n=2", single("trivext(GF(4))"),
         cycle_ring(ring_from_name("trivext(GF(4))"), n=2)),
    )


# ----------------------------------------------------------- non-examples

def non_examples() -> list:
    """(label, thunk): each thunk either returns a ring without a Nakayama
    permutation or raises a build error carrying a witness."""
    F2 = galois_field(2)
    Z4 = zmod(4)
    te = ring_from_name("trivext(GF(2))")
    sq = square_zero_local(2, 2)
    res = lambda a, b: residue_bimodule(a, b)
    reg2 = regular_bimodule(F2)

    def upper_triangular():
        return build([F2, F2], [[None, reg2], [None, None]], name="upper triangular F2")

    def trivial_full(n):
        return build([F2] * n, [[None if i == j else reg2 for j in range(n)] for i in range(n)], name=f"trivial full {n}")

    def thin_z4_cycle():
        r = res(Z4, Z4)
        return build([Z4, Z4], [[None, r], [r, None]], name="Z/4 with residue off-diagonal")

    def two_socle_row():
        r = res(Z4, Z4)
        return build([Z4, Z4, Z4], [[None, r, r], [r, None, r], [r, r, None]], name="Z/4 trivial 3x3 residue")

    def square_zero_pair():
        return build([sq, sq], [[None, None], [None, None]], name="square-zero pair")

    def broken_pairing_alpha():
        # x·y·eps is balanced and lands in the radical, but (xy)z != x(yz) once the return product is zero
        R = cycle_ring(te, n=2)
        B = R.bimodules
        eps = 1
        t = te.mul[te.mul, eps]
        return build([te, te], [[None, B[0][1]], [B[1][0], None]], {(0, 1, 0): t}, name="broken pairing")

    def unbalanced_product():
        R = cycle_ring(Z4, n=2)
        B = R.bimodules
        t = np.zeros((4, 4), dtype=np.int64)
        t[1, :] = 2  # not additive in the first factor
        return build([Z4, Z4], [[None, B[0][1]], [B[1][0], None]], {(0, 1, 0): t}, name="unbalanced product")

    def support_without_products():
        S = support_pattern_ring(4, [2], Z4)
        return build(S.rings, [list(r) for r in S.bimodules], {}, name="support pattern, products dropped")

    def radical_violation():
        # B12 B21 hitting a unit makes the two rows isomorphic
        t = np.array([[0, 0], [0, 1]])
        return build([F2, F2], [[None, reg2], [reg2, None]], {(0, 1, 0): t, (1, 0, 1): t}, name="full matrix ring")

    def f2_with_square_zero():
        return build([F2, sq], [[None, None], [None, None]], name="GF(2) x square-zero")

    def wrong_side_envelope():
        # E is injective on one side only
        E = validate_bimodule(F2, te, np.array([[0, 1], [1, 0]]), np.array([[0, 0], [0, 1]]),
                              np.array([[0, 0, 0, 0], [0, 0, 1, 1]]), 0, name="one-sided")
        r = validate_bimodule(te, F2, np.array([[0, 1], [1, 0]]), np.array([[0, 0], [0, 0], [0, 1], [0, 1]]),
                              np.array([[0, 0], [0, 1]]), 0, name="one-sided-back")
        return build([F2, te], [[None, E], [r, None]], name="mismatched sides")

    return [
        ("upper triangular F2", upper_triangular),
        ("trivial full 3x3 over F2", lambda: trivial_full(3)),
        ("Z/4 with residue off-diagonal", thin_z4_cycle),
        ("Z/4 trivial 3x3 residue", two_socle_row),
        ("square-zero local ring", lambda: single("GF(2)[x,y]/(x^2,xy,y^2)")),
        ("square-zero pair", square_zero_pair),
        ("GF(2) x square-zero", f2_with_square_zero),
        ("broken pairing product", broken_pairing_alpha),
        ("unbalanced pairing product", unbalanced_product),
        ("support pattern without products", support_without_products),
        ("unit in B12 B21", radical_violation),
        ("mismatched one-sided envelope", wrong_side_envelope),
    ]
