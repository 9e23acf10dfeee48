"""Decision procedures on formal matrix rings.

Two independent routes to the Nakayama permutation live here:

* ``detect_nakayama_direct`` works from the definition. It enumerates cyclic
  submodules of each row module ``e_i R`` to get the socle, then compares it
  with the tops ``e_j R / e_j J`` up to isomorphism. The left side is the
  same computation on the opposite ring.
* ``check_criterion`` evaluates the coordinate conditions on annihilating
  parts of the bimodules and their socles, without ever forming a cyclic
  submodule of the whole row.

The enumeration harness compares the two on every ring it builds.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import InternalCheckFailed, PrerequisiteFailed, SizeLimitExceeded, SoclesDiffer
from .formal import (
    FormalMatrixRing,
    RowModule,
    RowSubmodule,
    central_idempotent_blocks,
    corner,
    flatten,
    opposite_formal,
    row_module_of_idempotent,
)
from .modules import (
    RIGHT,
    FiniteModule,
    Submodule,
    is_essential,
    is_injective,
    is_simple,
    module_isomorphic,
    socle,
    submodule_module,
    top,
)
from .rings import FiniteRing, compose_maps, is_ring_homomorphism, residue_field

SCHEMA_VERSION = 1


# ------------------------------------------------------------ permutations

@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def cycle(cls, n: int) -> "Permutation":
        """i -> i + 1 mod n, written (1 2 ... n)."""
        return cls(tuple((i + 1) % n for i in range(n)))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Permutation":
        """Parse 1-based cycle notation such as "(1 2 3)(4 5)" or "id"."""
        text = text.strip()
        cycles = []
        if text not in ("", "id", "()"):
            if not (text.startswith("(") and text.endswith(")")):
                raise ValueError(f"bad cycle notation {text!r}")
            for chunk in text[1:-1].split(")("):
                cycles.append([int(tok) - 1 for tok in chunk.replace(",", " ").split()])
        seen = [x for c in cycles for x in c]
        if len(seen) != len(set(seen)) or any(x < 0 for x in seen):
            raise ValueError(f"bad cycle notation {text!r}")
        size = max([n or 0] + [x + 1 for x in seen])
        images = list(range(size))
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                images[a] = b
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __len__(self) -> int:
        return len(self.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(self.n):
            if start in seen:
                continue
            c = [start]
            seen.add(start)
            x = self.images[start]
            while x != start:
                c.append(x)
                seen.add(x)
                x = self.images[x]
            out.append(tuple(c))
        return out

    @property
    def fixed_points(self) -> list[int]:
        return [i for i in range(self.n) if self.images[i] == i]

    @property
    def is_full_cycle(self) -> bool:
        return len(self.cycles()) == 1

    def restrict(self, I: Iterable[int]) -> "Permutation":
        I = sorted(I)
        pos = {x: a for a, x in enumerate(I)}
        return Permutation(tuple(pos[self.images[x]] for x in I))

    def __str__(self) -> str:
        return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in self.cycles())

    def __repr__(self) -> str:
        return f"Permutation({self})"


def concatenate(sigma: Permutation, sigma2: Permutation) -> Permutation:
    n = sigma.n
    return Permutation(tuple(sigma.images) + tuple(n + x for x in sigma2.images))


# --------------------------------------------------------------- socles

def annihilating_part(R: FormalMatrixRing, i: int, j: int) -> frozenset[int]:
    """N_ij: elements m of B_ij with m·B_jk = 0 for every k != j."""
    B = R.bimodules[i][j]
    keep = np.ones(B.size, dtype=bool)
    for k in range(R.order):
        if k != j:
            keep &= (R.products[(i, j, k)] == R.bimodules[i][k].zero).all(axis=1)
    return frozenset(int(x) for x in np.flatnonzero(keep))


def _socle_mask(R: FormalMatrixRing, i: int, j: int) -> np.ndarray:
    cache = R.__dict__.setdefault("_socle_masks", {})
    if (i, j) not in cache:
        cache[(i, j)] = socle(R.bimodules[i][j].as_right, check=False).mask
    return cache[(i, j)]


def row_socle(R: FormalMatrixRing, i: int) -> RowSubmodule:
    """soc(e_i R) assembled coordinatewise from the socles of the N_ij."""
    M = row_module_of_idempotent(R, i)
    parts = []
    for j in range(R.order):
        N = annihilating_part(R, i, j)
        mask = _socle_mask(R, i, j)
        parts.append(frozenset(x for x in N if mask[x]))
    S = M.submodule(parts)
    if not S.is_submodule():
        raise InternalCheckFailed("row socle is not a submodule", witness={"row": i + 1, "parts": [sorted(p) for p in parts]})
    return S


def _enumerate_cyclics(M: RowModule, limit: int):
    """Cyclic submodule id tuple for every element code of M."""
    if M.size > limit:
        raise SizeLimitExceeded(f"row module", M.size, limit)
    X = M.decode_all()
    interned: dict[tuple[int, ...], int] = {}
    reps: list[tuple[int, ...]] = []
    of = np.empty(M.size, dtype=np.int64)
    for code, x in enumerate(X.tolist()):
        ids = M.cyclic_ids(x)
        cid = interned.get(ids)
        if cid is None:
            cid = interned[ids] = len(reps)
            reps.append(ids)
        of[code] = cid
    return reps, of


def _codes_of(M: RowModule, ids: tuple[int, ...]) -> np.ndarray:
    codes = np.zeros(1, dtype=np.int64)
    for k, g in enumerate(ids):
        codes = (codes[:, None] + M.group(k, g)[None, :] * M.strides[k]).ravel()
    return codes


def _sizes(M: RowModule, reps) -> np.ndarray:
    return np.array([int(np.prod([len(M.group(k, g)) for k, g in enumerate(ids)])) for ids in reps], dtype=np.int64)


def simple_cyclic_submodules(M: RowModule, limit: int | None = None) -> list[RowSubmodule]:
    limit = config.row_limit() if limit is None else limit
    reps, of = _enumerate_cyclics(M, limit)
    sizes = _sizes(M, reps)
    zero_code = M.encode(M.zero)
    out = []
    for cid, ids in enumerate(reps):
        if sizes[cid] <= 1:
            continue
        codes = _codes_of(M, ids)
        codes = codes[codes != zero_code]
        if (sizes[of[codes]] == sizes[cid]).all():
            out.append(RowSubmodule(M, tuple(frozenset(int(e) for e in M.group(k, g)) for k, g in enumerate(ids))))
    return out


def brute_socle_of(M: RowModule, limit: int | None = None) -> RowSubmodule:
    """Sum of all simple submodules, found by enumerating every cyclic submodule."""
    S = M.zero_submodule()
    for C in simple_cyclic_submodules(M, limit):
        S = S.plus(C)
    return S


def brute_socle(R: FormalMatrixRing, i: int, limit: int | None = None) -> RowSubmodule:
    return brute_socle_of(row_module_of_idempotent(R, i), limit)


# ------------------------------------------------------------- detection

@dataclass
class RowSocleInfo:
    row: int
    target: int | None
    reason: str
    socle: list[list[int]]
    method: str


def _coordinate_simple_top(R: FormalMatrixRing, j: int):
    cache = R.__dict__.setdefault("_tops", {})
    if j not in cache:
        from .modules import regular_bimodule

        cache[j] = top(regular_bimodule(R.rings[j]).as_right)[0]
    return cache[j]


def socle_targets(R: FormalMatrixRing, limit: int | None = None) -> list[RowSocleInfo]:
    """For each row: the coordinate j with soc(e_i R) isomorphic to top(e_j R), if any."""
    limit = config.row_limit() if limit is None else limit
    out = []
    for i in range(R.order):
        M = row_module_of_idempotent(R, i)
        if M.size <= limit:
            soc, method = brute_socle_of(M, limit), "cyclic-enumeration"
        else:
            soc, method = row_socle(R, i), "coordinate-formula"
        parts = [sorted(p) for p in soc.parts]
        support = soc.support
        if not support:
            out.append(RowSocleInfo(i, None, "zero socle", parts, method))
            continue
        if len(support) > 1:
            out.append(RowSocleInfo(i, None, f"socle spread over coordinates {[s + 1 for s in support]}", parts, method))
            continue
        j = support[0]
        T, _ = submodule_module(R.bimodules[i][j].as_right, soc.parts[j])
        if not is_simple(T):
            out.append(RowSocleInfo(i, None, f"socle at coordinate {j + 1} is not simple", parts, method))
            continue
        if module_isomorphic(T, _coordinate_simple_top(R, j)) is None:
            out.append(RowSocleInfo(i, None, f"socle at coordinate {j + 1} is not isomorphic to the top", parts, method))
            continue
        out.append(RowSocleInfo(i, j, "simple", parts, method))
    return out


@dataclass
class DetectionResult:
    permutation: Permutation | None
    right: list[RowSocleInfo]
    left: list[RowSocleInfo]
    reason: str


def detect_nakayama(R: FormalMatrixRing, limit: int | None = None) -> DetectionResult:
    right = socle_targets(R, limit)
    left = socle_targets(opposite_formal(R), limit)
    rt = [r.target for r in right]
    lt = [r.target for r in left]
    if None in rt:
        i = rt.index(None)
        return DetectionResult(None, right, left, f"row {i + 1}: {right[i].reason}")
    if None in lt:
        i = lt.index(None)
        return DetectionResult(None, right, left, f"column {i + 1}: {left[i].reason}")
    if len(set(rt)) != len(rt):
        return DetectionResult(None, right, left, "right socle targets are not a permutation")
    # left socles: soc(R e_{pi(i)}) must match top(R e_i), i.e. lt[pi(i)] == i
    for i, j in enumerate(rt):
        if lt[j] != i:
            return DetectionResult(None, right, left, f"column {j + 1} has socle at {lt[j] + 1}, expected {i + 1}")
    return DetectionResult(Permutation(tuple(rt)), right, left, "ok")


def detect_nakayama_direct(R: FormalMatrixRing, limit: int | None = None) -> Permutation | None:
    return detect_nakayama(R, limit).permutation


# --------------------------------------------------------------- criteria

@dataclass
class ConditionResult:
    condition: str
    index: int
    passed: bool
    witness: dict | None = None
    branch: str | None = None

    def to_dict(self) -> dict:
        d = {"condition": self.condition, "index": self.index + 1, "passed": self.passed}
        if self.branch is not None:
            d["branch"] = self.branch
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class CriterionReport:
    permutation: Permutation
    conditions: list[ConditionResult] = field(default_factory=list)
    N: dict = field(default_factory=dict)
    N_left: dict = field(default_factory=dict)
    T: dict = field(default_factory=dict)
    T_left: dict = field(default_factory=dict)
    note: str | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failures(self) -> list[ConditionResult]:
        return [c for c in self.conditions if not c.passed]

    def verdict(self, condition: str) -> bool:
        return all(c.passed for c in self.conditions if c.condition == condition)

    def to_dict(self) -> dict:
        d = {
            "permutation": str(self.permutation),
            "passed": self.passed,
            "conditions": [c.to_dict() for c in self.conditions],
        }
        if self.T:
            d["T"] = {str(i + 1): sorted(v) for i, v in sorted(self.T.items())}
        if self.T_left:
            d["T_left"] = {str(i + 1): sorted(v) for i, v in sorted(self.T_left.items())}
        if self.note:
            d["note"] = self.note
        return d


def _condition_one(R: FormalMatrixRing, N: dict, i: int, skip: int, label: str, slot) -> ConditionResult:
    """Every annihilating part N[(r, c)] off the pairing slot must vanish.

    ``slot(j)`` gives the (row, column) of R that holds the j-th part.
    """
    for j in range(R.order):
        if j == skip:
            continue
        r, c = slot(j)
        part = N[(r, c)]
        nonzero = sorted(x for x in part if x != R.bimodules[r][c].zero)
        if nonzero:
            mask = _socle_mask(R, r, c)
            soc = [x for x in nonzero if mask[x]]
            return ConditionResult(label, i, False, witness={
                "j": j + 1, "element": soc[0] if soc else nonzero[0], "annihilating_part": sorted(part)})
    return ConditionResult(label, i, True, branch="i+ii")


def _condition_two(R: FormalMatrixRing, N: dict, i: int, p: int, label: str) -> tuple[ConditionResult, frozenset]:
    mask = _socle_mask(R, i, p)
    T = frozenset(x for x in N[(i, p)] if mask[x])
    M = R.bimodules[i][p].as_right
    Tmod, _ = submodule_module(M, T)
    if is_simple(Tmod):
        return ConditionResult(label, i, True), T
    w = {"coordinate": p + 1, "T": sorted(T), "N": sorted(N[(i, p)])}
    proper = [x for x in sorted(T) if x != M.zero and len(M.cyclic(x)) < len(T)]
    if proper:
        w["proper_generator"] = proper[0]
    return ConditionResult(label, i, False, witness=w), T


def _all_parts(R: FormalMatrixRing) -> dict:
    return {(i, j): annihilating_part(R, i, j) for i in range(R.order) for j in range(R.order)}


def check_criterion(R: FormalMatrixRing, pi: Permutation) -> CriterionReport:
    """Conditions (1), (1'), (2), (2') for every index.

    The primed conditions are the unprimed ones on the opposite ring with the
    inverse permutation; witnesses are reported in R's own indices.
    """
    if pi.n != R.order:
        raise ValueError("permutation size differs from ring order")
    n = R.order
    op = opposite_formal(R)
    inv = pi.inverse()
    N, N_op = _all_parts(R), _all_parts(op)
    rep = CriterionReport(pi, N=N, N_left={(q, p): v for (p, q), v in N_op.items()})
    conds = []
    for i in range(n):
        conds.append(_condition_one(R, N, i, pi(i), "1", lambda j, i=i: (i, j)))
        # (1'): B_ij for j != pi(i) is op slot (j, i); check it has no left-annihilated part
        bad = None
        for j in range(n):
            if j == pi(i):
                continue
            part = N_op[(j, i)]
            nonzero = sorted(x for x in part if x != op.bimodules[j][i].zero)
            if nonzero:
                mask = _socle_mask(op, j, i)
                soc = [x for x in nonzero if mask[x]]
                bad = {"j": j + 1, "element": soc[0] if soc else nonzero[0], "annihilating_part": sorted(part)}
                break
        conds.append(ConditionResult("1'", i, bad is None, bad, "i+ii" if bad is None else None))
        c2, T = _condition_two(R, N, i, pi(i), "2")
        conds.append(c2)
        rep.T[i] = T
        # (2'): T'_i sits in op slot (pi(i), i), the pairing slot of op row pi(i)
        c2l, Tl = _condition_two(op, N_op, pi(i), i, "2'")
        w = c2l.witness
        if w is not None:
            w = {**w, "coordinate": pi(i) + 1}
        conds.append(ConditionResult("2'", i, c2l.passed, w))
        rep.T_left[i] = Tl
    conds.sort(key=lambda c: (c.condition, c.index))
    rep.conditions = conds
    rep.note = "finite carriers: branch (ii) holds exactly when the annihilating part is zero, so it coincides with (i)"
    return rep


def _right_essential_conditions(R: FormalMatrixRing, pi: Permutation, T: dict):
    a, b = [], []
    n = R.order
    for i in range(n):
        p = pi(i)
        M = R.bimodules[i][p].as_right
        sub = Submodule(M, T[i])
        if is_essential(sub):
            a.append(ConditionResult("a", i, True))
        else:
            mask = sub.mask
            hits = (mask[M.act] & (M.act != M.zero)).any(axis=1)
            bad = [x for x in range(M.size) if x != M.zero and not hits[x]]
            a.append(ConditionResult("a", i, False, witness={"coordinate": p + 1, "element": bad[0], "T": sorted(T[i])}))
        bad = None
        for j in range(n):
            if j == p:
                continue
            t = R.products[(i, j, p)]
            dead = (t == R.bimodules[i][p].zero).all(axis=1)
            dead[R.bimodules[i][j].zero] = False
            if dead.any():
                bad = {"j": j + 1, "element": int(np.flatnonzero(dead)[0])}
                break
        b.append(ConditionResult("b", i, bad is None, witness=bad))
    return a, b


def check_essential_criterion(R: FormalMatrixRing, pi: Permutation, strict: bool = True,
                              base: CriterionReport | None = None) -> CriterionReport:
    """Conditions (a), (b), (a'), (b').

    With ``strict`` the permutation must first pass ``check_criterion``;
    ``strict=False`` evaluates the conditions anyway (used for fixtures that
    are deliberately not Nakayama).
    """
    base = base or check_criterion(R, pi)
    if strict and not base.passed:
        raise PrerequisiteFailed(f"{pi} is not a Nakayama permutation", witness=[c.to_dict() for c in base.failures()])
    a, b = _right_essential_conditions(R, pi, base.T)
    op = opposite_formal(R)
    inv = pi.inverse()
    T_op = {p: base.T_left[inv(p)] for p in range(R.order)}
    a_l, b_l = _right_essential_conditions(op, inv, T_op)
    rep = CriterionReport(pi, N=base.N, N_left=base.N_left, T=base.T, T_left=base.T_left)
    conds = a + b
    for c in a_l:
        w = c.witness
        if w is not None:
            w = {**w, "coordinate": inv(c.index) + 1}
        conds.append(ConditionResult("a'", inv(c.index), c.passed, w))
    for c in b_l:
        w = c.witness
        if w is not None:
            # op slot (p, j) is B_{j, p}: the element lives in B_{j, pi(i)}
            w = {"j": w["j"], "element": w["element"]}
        conds.append(ConditionResult("b'", inv(c.index), c.passed, w))
    conds.sort(key=lambda c: (c.condition, c.index))
    rep.conditions = conds
    return rep


def _essential_rows(R: FormalMatrixRing, limit: int) -> tuple[bool, dict | None]:
    for i in range(R.order):
        M = row_module_of_idempotent(R, i)
        soc = row_socle(R, i)
        reps, of = _enumerate_cyclics(M, limit)
        for cid, ids in enumerate(reps):
            if all(len(M.group(k, g)) == 1 for k, g in enumerate(ids)):
                continue
            if not any(len(set(M.group(k, g).tolist()) & soc.parts[k]) > 1 for k, g in enumerate(ids)):
                code = int(np.flatnonzero(of == cid)[0])
                x = M.decode_all()[code].tolist()
                return False, {"row": i + 1, "element": x}
    return True, None


def essential_socle_direct(R: FormalMatrixRing, side: str = RIGHT, limit: int | None = None,
                           with_witness: bool = False):
    """Whether every nonzero cyclic submodule of every row (column) meets its socle."""
    limit = config.row_limit() if limit is None else limit
    target = R if side == RIGHT else opposite_formal(R)
    ok, w = _essential_rows(target, limit)
    return (ok, w) if with_witness else ok


# ---------------------------------------------------------- classification

def ring_hash(R: FormalMatrixRing) -> str:
    h = hashlib.sha256()
    h.update(str(R.order).encode())
    for Ri in R.rings:
        h.update(np.ascontiguousarray(Ri.add, dtype=np.int32).tobytes())
        h.update(np.ascontiguousarray(Ri.mul, dtype=np.int32).tobytes())
    for row in R.bimodules:
        for B in row:
            for t in (B.add, B.left, B.right):
                h.update(np.ascontiguousarray(t, dtype=np.int32).tobytes())
    for key in sorted(R.products):
        h.update(repr(key).encode())
        h.update(np.ascontiguousarray(R.products[key], dtype=np.int32).tobytes())
    return h.hexdigest()


@dataclass
class AnalysisReport:
    ring_hash: str
    order: int
    sizes: list
    nakayama: Permutation | None
    detection_reason: str
    detection_method: str
    criterion: CriterionReport
    essential: CriterionReport | None
    right_socle_essential: bool | None
    left_socle_essential: bool | None
    socles_coincide: bool | None
    classification: str
    blocks: list[list[int]]
    is_basic: bool = True
    multiplicities: tuple[int, ...] = ()

    @property
    def is_frobenius(self) -> bool:
        return self.classification == "Frobenius"

    def summary(self) -> str:
        if self.nakayama is None:
            fails = self.criterion.failures()
            first = fails[0] if fails else None
            extra = f"; candidate {self.criterion.permutation} fails ({first.condition}) at index {first.index + 1}" if first else ""
            return f"no Nakayama permutation ({self.detection_reason}){extra}"
        naka = f"Nakayama {self.nakayama}"
        if self.nakayama == Permutation.identity(self.order):
            naka += " (identity)"
        parts = [self.classification, naka]
        if self.right_socle_essential and self.left_socle_essential:
            parts.append("essential")
        if self.socles_coincide:
            parts.append("socles coincide")
        parts.append("indecomposable" if len(self.blocks) == 1 else f"{len(self.blocks)} blocks")
        return ", ".join(parts)

    def to_dict(self) -> dict:
        return {
            "ring_hash": self.ring_hash,
            "order": self.order,
            "sizes": self.sizes,
            "is_basic": self.is_basic,
            "multiplicities": list(self.multiplicities),
            "nakayama": str(self.nakayama) if self.nakayama is not None else None,
            "detection": {"reason": self.detection_reason, "method": self.detection_method},
            "classification": self.classification,
            "criterion": self.criterion.to_dict(),
            "essential_criterion": self.essential.to_dict() if self.essential is not None else None,
            "right_socle_essential": self.right_socle_essential,
            "left_socle_essential": self.left_socle_essential,
            "socles_coincide": self.socles_coincide,
            "blocks": [[i + 1 for i in b] for b in self.blocks],
            "summary": self.summary(),
        }


def _candidate(R: FormalMatrixRing, det: DetectionResult) -> Permutation:
    """A permutation to run the criterion on when detection found none."""
    n = R.order
    guess: list[int | None] = []
    for i in range(n):
        soc = row_socle(R, i)
        guess.append(soc.support[0] if soc.support else None)
    used = set()
    images = []
    for g in guess:
        images.append(g if g is not None and g not in used else None)
        if images[-1] is not None:
            used.add(images[-1])
    free = [j for j in range(n) if j not in used]
    images = [x if x is not None else free.pop(0) for x in images]
    return Permutation(tuple(images))


def classify(R: FormalMatrixRing, limit: int | None = None) -> AnalysisReport:
    limit = config.row_limit() if limit is None else limit
    det = detect_nakayama(R, limit)
    methods = sorted({r.method for r in det.right + det.left})
    pi = det.permutation
    if pi is None:
        crit = check_criterion(R, _candidate(R, det))
        if crit.passed:
            raise InternalCheckFailed("criterion accepts a permutation the direct detection rejects",
                                      witness={"permutation": str(crit.permutation), "reason": det.reason})
        return AnalysisReport(ring_hash(R), R.order, [list(r) for r in R.sizes], None, det.reason, "+".join(methods),
                              crit, None, None, None, None, "no-Nakayama", central_idempotent_blocks(R),
                              multiplicities=(1,) * R.order)
    crit = check_criterion(R, pi)
    if not crit.passed:
        raise InternalCheckFailed("direct detection found a permutation the criterion rejects",
                                  witness={"permutation": str(pi), "failures": [c.to_dict() for c in crit.failures()]})
    ess = check_essential_criterion(R, pi, base=crit)
    right = essential_socle_direct(R, RIGHT, limit) if max(R.row_size(i) for i in range(R.order)) <= limit else ess.verdict("a") and ess.verdict("b")
    op = opposite_formal(R)
    left = essential_socle_direct(R, "left", limit) if max(op.row_size(i) for i in range(R.order)) <= limit else ess.verdict("a'") and ess.verdict("b'")
    coincide = all(crit.T[i] == crit.T_left[i] for i in range(R.order))
    return AnalysisReport(ring_hash(R), R.order, [list(r) for r in R.sizes], pi, det.reason, "+".join(methods),
                          crit, ess, right, left, coincide, "Frobenius", central_idempotent_blocks(R),
                          multiplicities=(1,) * R.order)


# ----------------------------------------------------- residue isomorphisms

@dataclass(frozen=True, eq=False)
class FieldIsomorphism:
    source: FiniteRing
    target: FiniteRing
    images: np.ndarray
    generator: int


def residue_field_iso(R: FormalMatrixRing, i: int, pi: Permutation, report: CriterionReport | None = None) -> FieldIsomorphism:
    """phi_m with k·m = m·phi_m(k) on the common socle T of B_{i, pi(i)}."""
    report = report or check_criterion(R, pi)
    p = pi(i)
    T, T2 = report.T[i], report.T_left[i]
    if T != T2:
        raise SoclesDiffer(f"left and right socles of slot ({i + 1},{p + 1}) differ",
                           witness={"right": sorted(T), "left": sorted(T2)})
    B = R.bimodules[i][p]
    nz = sorted(x for x in T if x != B.zero)
    if not nz:
        raise SoclesDiffer("pairing socle is zero", witness={"slot": [i + 1, p + 1]})
    m = nz[0]
    src = residue_field(R.rings[i])
    dst = residue_field(R.rings[p])
    K1, K2 = src.residue_field, dst.residue_field
    images = np.empty(K1.size, dtype=np.int64)
    right_of_m = {int(B.right[m, dst.lifts[k]]): k for k in range(K2.size)}
    for k in range(K1.size):
        km = int(B.left[src.lifts[k], m])
        if km not in right_of_m:
            raise InternalCheckFailed("k·m is not of the form m·k'", witness={"k": k, "m": m})
        images[k] = right_of_m[km]
    if not is_ring_homomorphism(K1, K2, images) or len(set(images.tolist())) != K1.size:
        raise InternalCheckFailed("residue map is not a field isomorphism", witness={"images": images.tolist()})
    return FieldIsomorphism(K1, K2, images, m)


# ----------------------------------------------------- structural predicates

def _verdict(applicable: bool, holds: bool, witness=None) -> dict:
    d = {"applicable": applicable, "holds": holds}
    if witness is not None:
        d["witness"] = witness
    return d


def verify_fixed_point_prop(R: FormalMatrixRing, pi: Permutation) -> list[dict]:
    """A fixed point with a simple corner splits off as its own block."""
    out = []
    blocks = central_idempotent_blocks(R)
    for i in pi.fixed_points:
        if not R.rings[i].is_field:
            out.append({"index": i + 1, **_verdict(False, True)})
            continue
        bad = [j + 1 for j in range(R.order) if j != i and (R.bimodules[i][j].size > 1 or R.bimodules[j][i].size > 1)]
        holds = not bad and [i] in blocks
        out.append({"index": i + 1, **_verdict(True, holds, {"nonzero_with": bad} if bad else None)})
    return out


def coordinate_simple_module(F: FiniteRing, R: FormalMatrixRing, i: int) -> FiniteModule:
    """The simple right module with the residue field of R_i at coordinate i, over flatten(R)."""
    n = R.order
    res = residue_field(R.rings[i])
    K = res.residue_field
    stride = 1
    for a in range(n - 1, -1, -1):
        for b in range(n - 1, -1, -1):
            if (a, b) == (i, i):
                break
            stride *= R.bimodules[a][b].size
        else:
            continue
        break
    diag = (np.arange(F.size) // stride) % R.rings[i].size
    act = K.mul[:, res.projection[diag]]
    return FiniteModule(F, RIGHT, K.add, act, K.zero)


def _envelope_size_by_duality(R: FormalMatrixRing, i: int) -> int:
    """|E(S_i)| = |R e_i|: the envelope of the simple at i is the dual of the left column at i."""
    return int(np.prod([R.bimodules[j][i].size for j in range(R.order)], dtype=object))


def verify_simple_injective_cor(R: FormalMatrixRing, limit: int = 1024) -> list[dict]:
    """An injective simple coordinate module sits in a central field block.

    Up to ``limit`` the envelope is built inside the flattened ring; above it
    the envelope size comes from duality with the left column.
    """
    if detect_nakayama_direct(R) is None:
        raise PrerequisiteFailed("ring has no Nakayama permutation")
    F = flatten(R, limit=limit) if R.total_size <= limit else None
    blocks = central_idempotent_blocks(R)
    out = []
    for i in range(R.order):
        if F is not None:
            inj = is_injective(coordinate_simple_module(F, R, i))
            method = "envelope"
        else:
            k = residue_field(R.rings[i]).residue_field.size
            inj = _envelope_size_by_duality(R, i) == k
            method = "duality"
        if inj:
            holds = [i] in blocks and R.rings[i].is_field
            out.append({"index": i + 1, "injective": True, "method": method, **_verdict(True, holds)})
        else:
            out.append({"index": i + 1, "injective": False, "method": method, **_verdict(False, True)})
    return out


def verify_structure_props(R: FormalMatrixRing, pi: Permutation) -> dict:
    n = R.order
    out = {}
    # pairing bimodules are faithful as left modules
    bad = []
    for i in range(n):
        p = pi(i)
        if p == i:
            continue
        ann = R.bimodules[i][p].as_left.annihilator()
        if ann != {R.rings[i].zero}:
            bad.append({"index": i + 1, "annihilator": sorted(ann)})
    out["faithful_pairing"] = _verdict(n > 1, not bad, bad or None)
    # trivial indecomposable rings have a single cycle and only pairing slots
    blocks = central_idempotent_blocks(R)
    if R.is_trivial and len(blocks) == 1 and n > 1:
        extra = sorted((i + 1, j + 1) for i, j in R.support if i != j and j != pi(i))
        out["trivial_is_cycle"] = _verdict(True, pi.is_full_cycle and not extra,
                                           {"cycles": str(pi), "extra_slots": extra} if extra or not pi.is_full_cycle else None)
    else:
        out["trivial_is_cycle"] = _verdict(False, True)
    # prefix splits: lower-left block zero iff upper-right block zero
    bad = []
    for k in range(1, n):
        lower = any((i, j) in R.support for i in range(k, n) for j in range(k))
        upper = any((i, j) in R.support for i in range(k) for j in range(k, n))
        if lower != upper:
            bad.append({"split": k, "lower_zero": not lower, "upper_zero": not upper})
    out["triangular_symmetry"] = _verdict(n > 1, not bad, bad or None)
    # shifted diagonals close up when pi is one n-cycle
    if pi.is_full_cycle and n > 1:
        order = [0]
        while len(order) < n:
            order.append(pi(order[-1]))
        nonzero = lambda a, b: (order[a % n], order[b % n]) in R.support
        bad = []
        for i in range(n):
            for k in range(2, n):
                if nonzero(i, i + k):
                    for j in range(n):
                        if not nonzero(j, j + k) or not nonzero(j, j - k + 1):
                            bad.append({"from": [i + 1, k], "missing_at": j + 1})
        out["shifted_diagonal"] = _verdict(True, not bad, bad[:5] or None)
    else:
        out["shifted_diagonal"] = _verdict(False, True)
    # products B_ij B_ji land in the radical
    bad = []
    for i in range(n):
        J = R.rings[i].radical_mask
        for j in range(n):
            if j != i and not J[R.products[(i, j, i)]].all():
                bad.append([i + 1, j + 1])
    out["radical_containment"] = _verdict(n > 1, not bad, bad or None)
    return out


def cycle_unions(pi: Permutation, max_unions: int = 64) -> list[list[int]]:
    cycles = pi.cycles()
    out = []
    for r in range(1, len(cycles) + 1):
        for combo in itertools.combinations(cycles, r):
            out.append(sorted(x for c in combo for x in c))
            if len(out) >= max_unions:
                return out
    return out


def verify_corner_prop(R: FormalMatrixRing, pi: Permutation) -> list[dict]:
    """Corners on unions of cycles keep the restricted permutation and essential socles."""
    out = []
    for I in cycle_unions(pi):
        C = corner(R, I)
        rep = classify(C)
        expect = pi.restrict(I)
        holds = rep.nakayama == expect and bool(rep.right_socle_essential) and bool(rep.left_socle_essential)
        out.append({"indices": [i + 1 for i in I], "expected": str(expect),
                    "found": str(rep.nakayama) if rep.nakayama else None, "holds": holds})
    return out


def verify_residue_cycles(R: FormalMatrixRing, pi: Permutation) -> list[dict]:
    """Compose residue isomorphisms around each cycle; the result is an automorphism."""
    rep = check_criterion(R, pi)
    out = []
    for c in pi.cycles():
        maps = [residue_field_iso(R, i, pi, rep) for i in c]
        total = compose_maps(*[m.images for m in reversed(maps)])
        K = maps[0].source
        holds = is_ring_homomorphism(K, K, total) and len(set(total.tolist())) == K.size
        out.append({"cycle": [i + 1 for i in c], "holds": holds,
                    "identity": bool(np.array_equal(total, np.arange(K.size))), "automorphism": total.tolist()})
    return out
