"""Acceptance gate: one pass/fail line per criterion.

Run under pytest (each criterion is a test and prints its line) or directly
with ``python tests/test_acceptance.py``.
"""
import random
import sys
import time

import pytest

from kmcrystal import adhm
from kmcrystal import ic_stalks as ic
from kmcrystal.b_infinity import (
    check_axioms,
    check_commutation,
    check_kpf,
    check_psi,
    enumerate_graph,
    highest_weight_report,
)
from kmcrystal.parabolic import check_parabolic, parabolic_table
from kmcrystal.root_datum import affinize, build_finite

A1 = build_finite("A", 1)
A2 = build_finite("A", 2)
A1_AFF = affinize(A1)

_graphs = {}


def graph(d, h):
    key = (d.key, h)
    if key not in _graphs:
        _graphs[key] = enumerate_graph(d, h)
    return _graphs[key]


def _reports_ok(*reports):
    bad = [f"{r.name}: {r.violations[:2]}" for r in reports if not r.ok]
    return not bad, "; ".join(bad) or ", ".join(f"{r.name}={r.checked}" for r in reports)


def crit_kpf():
    start = time.perf_counter()
    ok, detail = _reports_ok(check_kpf(enumerate_graph(A2, 8)), check_kpf(enumerate_graph(A1_AFF, 5)))
    elapsed = time.perf_counter() - start
    return ok and elapsed < 60, f"{detail} in {elapsed:.2f}s (limit 60s)"


def crit_axioms():
    return _reports_ok(check_axioms(graph(A2, 6)))


def crit_commutation():
    return _reports_ok(check_commutation(graph(A2, 6)), check_commutation(graph(A1_AFF, 4)))


def crit_psi():
    return _reports_ok(check_psi(graph(A2, 6)), check_psi(graph(A1_AFF, 4)))


def crit_highest_weight():
    return _reports_ok(highest_weight_report(graph(A2, 6)), highest_weight_report(graph(A1_AFF, 4)))


def crit_parabolic():
    g = graph(A2, 8)
    reports = [check_parabolic(g, m) for m in ({1}, {2})]
    ok, detail = _reports_ok(*reports)
    complete = 0
    for m in ({1}, {2}):
        for row in parabolic_table(g, m):
            if row.mult_graph is not None:
                complete += 1
                ok = ok and row.mult_graph == row.mult_char == row.mult_cnu
    return ok and complete > 0, f"{detail}; {complete} complete rows agree three ways"


def crit_stalks():
    start = time.perf_counter()
    got = {r: ic.normalized_point_stalk(build_finite("A", r)) for r in (1, 2, 3)}
    elapsed = time.perf_counter() - start
    want = {1: {0: 1}, 2: {0: 1, 2: 1}, 3: {0: 1, 2: 1, 4: 1}}
    ok = got == want and all(got[r] == ic.exponent_polynomial(build_finite("A", r)) for r in got)
    text = ", ".join(f"sl{r + 1} -> {ic.format_qpoly(p)}" for r, p in got.items())
    return ok and elapsed < 1, f"{text} in {elapsed:.3f}s"


def crit_dims():
    borel = all(ic.zastava_dims(A2, (), A2.simple(i))["dimension"] == 2 for i in A2.labels)
    bundle = ic.bundle_dimension(A1, 1) == 4
    deltas = {}
    for fam, r in (("A", 1), ("A", 2), ("D", 4)):
        d = affinize(build_finite(fam, r))
        deltas[d.name] = (d.length(d.to_weight(d.delta)), d.dual_coxeter())
    ok = borel and bundle and all(a == b for a, b in deltas.values())
    return ok, f"2|alpha_i|=2: {borel}, 2*h*a=4: {bundle}, |delta| vs h: {deltas}"


def crit_vanishing():
    bad = [n for n in range(101) if ic.cartier_vanishing_order(n) != ic.filtration_sum(n)]
    return not bad, f"n=0..100, mismatches {bad}"


def crit_adhm():
    start = time.perf_counter()
    rng = random.Random(20240601)
    monad_ok = all(
        adhm.monad_identity_check(adhm.random_datum(rng, rng.randint(0, 4), rng.randint(0, 4)))[2] for _ in range(100)
    )
    conj_ok = True
    for _ in range(10):
        a, n = rng.randint(1, 3), rng.randint(1, 2)
        x = adhm.random_datum(rng, a, n)
        y = x.conjugate(adhm.random_invertible(rng, a))
        conj_ok &= adhm.charpoly_projections(x) == adhm.charpoly_projections(y)
        conj_ok &= adhm.invariants(x, 3) == adhm.invariants(y, 3)
    reorder_ok = True
    samples = [adhm.random_moment_solution(rng, a, 2) for a in (2, 3, 4, 3)] + [adhm.noncommuting_solution()]
    for x in samples:
        reorder_ok &= adhm.moment_residual(x).is_zero_matrix
        reorder_ok &= all(v == 0 for k, v in adhm.invariants(x, 4).items() if k.startswith("T_W"))
        reorder_ok &= adhm.trace_reordering_report(x, 4) == []
    elapsed = time.perf_counter() - start
    ok = monad_ok and conj_ok and reorder_ok and elapsed < 30
    return ok, f"monad={monad_ok}, conjugation={conj_ok}, reordering={reorder_ok} in {elapsed:.2f}s"


CRITERIA = [
    (1, "KPF identity (A2 h<=8, affine A1 h<=5)", crit_kpf),
    (2, "crystal axioms (A2 h<=6)", crit_axioms),
    (3, "ordinary/star commutation (A2 h<=6, affine A1 h<=4)", crit_commutation),
    (4, "Psi_i morphism and bijection", crit_psi),
    (5, "highest-weight property", crit_highest_weight),
    (6, "parabolic three-way count (A2, m={1},{2}, h<=8)", crit_parabolic),
    (7, "IC stalks sl2/sl3/sl4", crit_stalks),
    (8, "dimension formulas", crit_dims),
    (9, "vanishing order n<=100", crit_vanishing),
    (10, "ADHM monad, conjugation, trace reordering", crit_adhm),
]


def run_one(num, title, fn):
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} -- {detail}"
    return ok, line


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, line = run_one(num, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_one(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
