"""Acceptance criteria 1-8. Run directly or through pytest; one line per criterion
is printed in the terminal summary."""

import subprocess
import sys
import time

import pytest

from corpus import frobenius_corpus, glue_pairs, non_examples, single, support_cases, diagonal
from formalrings.analysis import (
    Permutation,
    brute_socle,
    check_criterion,
    check_essential_criterion,
    classify,
    concatenate,
    detect_nakayama_direct,
    essential_socle_direct,
    row_socle,
    verify_fixed_point_prop,
    verify_residue_cycles,
    verify_simple_injective_cor,
    verify_structure_props,
)
from formalrings.config import DEFAULT_ROW_LIMIT
from formalrings.constructions import glue, prepare_glue, support_pattern_ring
from formalrings.enumerate import EnumerationJob, run_job
from formalrings.errors import AssumptionFailed, FormalRingError
from formalrings.formal import corner, is_indecomposable
from formalrings.rings import zmod
from formalrings.specio import load_ring

MENU = ("GF(2)", "Z/4", "GF(2)[x]/(x^2)")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "formalrings", *args], capture_output=True, text=True)


def _radical_failures(R):
    bad = []
    for i in range(R.order):
        J = R.rings[i].radical_mask
        for j in range(R.order):
            if j != i and not J[R.products[(i, j, i)]].all():
                bad.append((i + 1, j + 1))
    return bad


@pytest.fixture(scope="module")
def censuses(tmp_path_factory):
    dump = str(tmp_path_factory.mktemp("discrepancies"))
    start = time.perf_counter()
    exhaustive = run_job(EnumerationJob(order=2, carrier_bound=4, menu=MENU), dump, keep_rings=True)
    rand = run_job(EnumerationJob(order=3, carrier_bound=4, menu=("GF(2)", "Z/4"), mode="random", seed=1, count=500),
                   dump, keep_rings=True)
    return exhaustive, rand, time.perf_counter() - start


@pytest.mark.criterion(1)
def test_cycle_ring_example(tmp_path, record_property):
    spec = tmp_path / "cycle.yaml"
    start = time.perf_counter()
    gen = _cli("generate", "cycle", "--base", "Z/4", "--n", "3", "-o", str(spec))
    out = _cli("analyze", str(spec))
    elapsed = time.perf_counter() - start
    line = out.stdout.strip()
    record_property("detail", f"'{line}' in {elapsed:.2f} s")
    assert gen.returncode == 0 and out.returncode == 0
    assert line.startswith("Frobenius, Nakayama (1 2 3), essential, socles coincide")
    assert elapsed < 1.0


@pytest.mark.criterion(2)
def test_serial_quiver_example(tmp_path, record_property):
    spec = tmp_path / "serial.yaml"
    start = time.perf_counter()
    gen = _cli("generate", "serial", "--q", "2", "--n", "3", "--bound", "6", "-o", str(spec))
    out = _cli("analyze", str(spec))
    elapsed = time.perf_counter() - start
    R = load_ring(spec.read_text())
    rep = classify(R)
    nonzero = all((R.products[(i, (i + 1) % 3, i)] != R.bimodules[i][i].zero).any()
                  and (R.products[(i, (i + 1) % 3, (i + 2) % 3)] != R.bimodules[i][(i + 2) % 3].zero).any()
                  for i in range(3))
    sizes = [R.row_size(i) for i in range(3)]
    record_property("detail", f"'{out.stdout.strip()}', |e_iR| = {sizes}, pairing and path products nonzero: "
                              f"{nonzero}, {elapsed:.2f} s")
    assert gen.returncode == 0 and out.returncode == 0
    assert rep.is_frobenius and rep.is_basic and str(rep.nakayama) == "(1 2 3)"
    assert out.stdout.startswith("Frobenius, Nakayama (1 2 3)")
    assert nonzero
    assert sizes == [2**6] * 3
    assert elapsed < 1.0


@pytest.mark.criterion(3)
def test_criterion_equivalence_suite(censuses, record_property):
    exhaustive, rand, elapsed = censuses
    bad = exhaustive.discrepancies + rand.discrepancies
    record_property("detail", f"exhaustive order 2: {exhaustive.unique} unique rings ({exhaustive.nakayama} with a "
                              f"Nakayama permutation); random order 3: {rand.unique} rings "
                              f"({rand.nakayama} with one); {len(bad)} discrepancies; {elapsed:.0f} s")
    assert rand.unique == 500
    assert exhaustive.unique > 0
    assert not [d for d in bad if d.suite == "criterion"], [d.detail for d in bad][:3]
    assert elapsed < 300


@pytest.mark.criterion(4)
def test_essential_equivalence_suite(censuses, record_property):
    exhaustive, rand, _ = censuses
    checked = 0
    bad = []
    for R in exhaustive.rings + rand.rings:
        pi = detect_nakayama_direct(R)
        if pi is None:
            continue
        checked += 1
        ess = check_essential_criterion(R, pi)
        right = ess.verdict("a") and ess.verdict("b")
        left = ess.verdict("a'") and ess.verdict("b'")
        if right != essential_socle_direct(R, "right") or left != essential_socle_direct(R, "left"):
            bad.append(R.name)
    record_property("detail", f"{checked} rings with a Nakayama permutation, both sides compared, "
                              f"{len(bad)} discrepancies")
    assert checked == exhaustive.nakayama + rand.nakayama > 0
    assert not bad, bad[:5]


@pytest.mark.criterion(5)
def test_socle_formula_and_radical_containment(censuses, record_property):
    exhaustive, rand, _ = censuses
    rings = [R for _, R in frobenius_corpus()] + exhaustive.rings + rand.rings
    rows = 0
    socle_bad, radical_bad = [], []
    for R in rings:
        for i in range(R.order):
            if R.row_size(i) <= DEFAULT_ROW_LIMIT:
                rows += 1
                if row_socle(R, i) != brute_socle(R, i, DEFAULT_ROW_LIMIT):
                    socle_bad.append((R.name, i + 1))
        if _radical_failures(R):
            radical_bad.append(R.name)
    record_property("detail", f"{rows} rows over {len(rings)} rings: {len(socle_bad)} socle mismatches, "
                              f"{len(radical_bad)} radical-containment failures")
    assert not socle_bad, socle_bad[:5]
    assert not radical_bad, radical_bad[:5]


_NEGATIVE_GLUE = {
    "A": (lambda: diagonal("trivext(GF(2))", "trivext(GF(4))"), lambda: single("trivext(GF(2))")),
    "A'": (lambda: single("trivext(GF(2))"), lambda: diagonal("trivext(GF(2))", "trivext(GF(4))")),
    "B": (lambda: single("trivext(GF(2))"), lambda: single("trivext(GF(4))")),
    "C": (lambda: single("trivext(GF(4),twist=1)"), lambda: single("trivext(GF(4))")),
    "C'": (lambda: single("trivext(GF(4))"), lambda: single("trivext(GF(4),twist=1)")),
    "D": (lambda: single("GF(2)"), lambda: single("trivext(GF(2))")),
    "D'": (lambda: single("trivext(GF(2))"), lambda: single("GF(2)")),
}


@pytest.mark.criterion(6)
def test_glue_suite(record_property):
    start = time.perf_counter()
    problems = []
    pairs = glue_pairs()
    for a, b, S, S2 in pairs:
        label = f"{a} + {b}"
        try:
            G = glue(S, S2)
        except FormalRingError as exc:
            problems.append(f"{label}: {type(exc).__name__}")
            continue
        rep = classify(G)
        expected = concatenate(detect_nakayama_direct(S), detect_nakayama_direct(S2))
        n = S.order
        if rep.nakayama != expected:
            problems.append(f"{label}: Nakayama {rep.nakayama}, expected {expected}")
        if not is_indecomposable(G):
            problems.append(f"{label}: decomposable")
        if not corner(G, range(n)).same_tables(S) or not corner(G, range(n, G.order)).same_tables(S2):
            problems.append(f"{label}: corner round-trip")
        inputs_essential = all(essential_socle_direct(X, side) for X in (S, S2) for side in ("right", "left"))
        if inputs_essential and not (rep.right_socle_essential and rep.left_socle_essential):
            problems.append(f"{label}: essential socle lost")
    negatives = {}
    for letter, (left, right) in _NEGATIVE_GLUE.items():
        try:
            prepare_glue(left(), right())
            negatives[letter] = None
        except AssumptionFailed as exc:
            negatives[letter] = (exc.condition, exc.witness)
    missed = [k for k, v in negatives.items() if v is None or v[0] != k or v[1] is None]
    elapsed = time.perf_counter() - start
    record_property("detail", f"{len(pairs)} pairs glued, {len(problems)} problems; negative fixtures "
                              f"{'/'.join(negatives)} rejected with witnesses except {missed or 'none'}; {elapsed:.1f} s")
    assert len(pairs) >= 5
    assert not problems, problems
    assert not missed
    assert elapsed < 60


@pytest.mark.criterion(7)
def test_structural_suite(record_property):
    failures = []
    checks = 0
    for label, R in frobenius_corpus():
        pi = detect_nakayama_direct(R)
        assert pi is not None, label
        results = [(k, v) for k, v in verify_structure_props(R, pi).items()]
        results += [("fixed point", v) for v in verify_fixed_point_prop(R, pi)]
        results += [("residue cycle", v) for v in verify_residue_cycles(R, pi)]
        results += [("simple injective", v) for v in verify_simple_injective_cor(R)]
        for name, v in results:
            checks += 1
            if not v["holds"]:
                failures.append(f"{label}: {name}")
    closure = 0
    for n, I in support_cases():
        R = support_pattern_ring(n, I, zmod(4))
        v = verify_structure_props(R, detect_nakayama_direct(R))["shifted_diagonal"]
        closure += 1
        if not (v["applicable"] and v["holds"]):
            failures.append(f"support n={n} I={list(I)}: shifted diagonal")
    record_property("detail", f"{checks} checks over {len(frobenius_corpus())} corpus rings, {closure} support "
                              f"patterns for shifted-diagonal closure, {len(failures)} failures")
    assert not failures, failures[:5]


@pytest.mark.criterion(8)
def test_negative_controls(record_property):
    missing = []
    entries = non_examples()
    for label, thunk in entries:
        try:
            R = thunk()
        except FormalRingError as exc:
            if exc.witness is None:
                missing.append(label)
            continue
        rep = classify(R)
        fails = rep.criterion.failures()
        if rep.nakayama is not None or not fails or any(c.witness is None for c in fails):
            missing.append(label)
    record_property("detail", f"{len(entries)} non-examples, {len(entries) - len(missing)} rejected with a witness")
    assert len(entries) >= 10
    assert not missing, missing


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
