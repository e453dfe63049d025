"""Parabolic decompositions of B(infinity) as counting identities.

For a finite-type subdiagram ``m`` the subset ``B^m`` consists of the elements
killed by every ``f*_i`` with ``i`` in ``m``.  On ``B^m`` the ``m``-directions act
by the ambient ``f_i`` and by the ambient ``e_i`` when the result stays inside
``B^m`` (and by zero otherwise).

In the positive-weight convention the element of a finite ``m``-string killed by
all ``f_i`` is the extremal vector of *lowest* weight, which is ``m``-antidominant.
Components and the sets ``C^nu`` are therefore labelled by that weight ``nu``.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .b_infinity import CrystalGraph, ModelInvariantError, _positive_weights, enumerate_graph
from .crystal_core import Report
from .root_datum import Coeffs, RootDatum, RootDatumError, dot_orbit, partition_count


@dataclass(frozen=True)
class LeviSpec:
    labels: frozenset[int]

    @classmethod
    def make(cls, datum: RootDatum, labels: Iterable[int]) -> "LeviSpec":
        labels = frozenset(labels)
        if not labels <= set(datum.labels):
            raise RootDatumError(f"Levi labels {sorted(labels)} not in {datum.labels}")
        datum.sub_datum(labels)  # raises unless finite type
        return cls(labels)

    def ordered(self, datum: RootDatum) -> tuple[int, ...]:
        return tuple(x for x in datum.labels if x in self.labels)


def _levi(datum: RootDatum, m) -> LeviSpec:
    return m if isinstance(m, LeviSpec) else LeviSpec.make(datum, m)


class BmSubset:
    """``B^m`` inside an enumerated graph, with the modified ``m``-operations."""

    def __init__(self, graph: CrystalGraph, m: LeviSpec):
        self.graph = graph
        self.m = m
        self.members = [k for k in range(len(graph)) if all(graph.f_star[i][k] is None for i in m.labels)]
        self._member_set = set(self.members)

    def __contains__(self, k) -> bool:
        return k in self._member_set

    def __len__(self) -> int:
        return len(self.members)

    def weight(self, k):
        return self.graph.weights[k]

    def f(self, i, k):
        return self.graph.f[i][k]

    def e(self, i, k):
        t = self.graph.e[i][k]
        if i in self.m.labels and t is not None and t not in self:
            return None
        return t

    def raises_past_truncation(self, k) -> bool:
        """Whether some modified ``e_i`` (i in m) leaves the height window inside ``B^m``."""
        g = self.graph
        if g.height(k) < g.max_height:
            return False
        model = g.model
        s = g.strings[k]
        for i in self.m.labels:
            t = model.e(i, s)
            if all(model.f_star(j, t) is None for j in self.m.labels):
                return True
        return False

    def weight_counts(self) -> dict[Coeffs, int]:
        out: dict[Coeffs, int] = defaultdict(int)
        for k in self.members:
            out[self.graph.weights[k]] += 1
        return dict(out)


def extract_bm(graph: CrystalGraph, m) -> BmSubset:
    return BmSubset(graph, _levi(graph.datum, m))


def levi_graph(graph: CrystalGraph, m) -> CrystalGraph:
    """B(infinity) of the Levi sub-datum, to the same height."""
    m = _levi(graph.datum, m)
    return enumerate_graph(graph.datum.sub_datum(m.labels), graph.max_height)


def _embed(datum: RootDatum, sub: RootDatum, w: Coeffs) -> Coeffs:
    out = [0] * datum.n
    for k, lab in enumerate(sub.labels):
        out[datum.pos[lab]] = w[k]
    return tuple(out)


def verify_complete_decomposition(graph: CrystalGraph, m, levi: CrystalGraph | None = None) -> Report:
    """``|B(lam)| = sum_{mu + nu = lam} |B^m(mu)| |B_m(nu)|`` for every height ``<= H``."""
    m = _levi(graph.datum, m)
    d = graph.datum
    levi = levi or levi_graph(graph, m)
    rep = Report(f"complete-decomposition m={sorted(m.labels)}")
    total = graph.weight_counts()
    bm = extract_bm(graph, m).weight_counts()
    levi_counts = {_embed(d, levi.datum, w): c for w, c in levi.weight_counts().items()}
    for lam in _positive_weights(d.n, graph.max_height):
        rep.checked += 1
        rhs = 0
        for nu, c in levi_counts.items():
            mu = tuple(a - b for a, b in zip(lam, nu))
            if min(mu) >= 0:
                rhs += bm.get(mu, 0) * c
        if total.get(lam, 0) != rhs:
            rep.add(weight=list(lam), total=total.get(lam, 0), product_sum=rhs)
    return rep


def dominant_conjugate(datum: RootDatum, m: LeviSpec, w: Coeffs) -> Coeffs:
    """The ``m``-dominant element of the ``W_m``-orbit of ``w``."""
    w = tuple(w)
    changed = True
    while changed:
        changed = False
        for i in m.labels:
            p = datum.pair(w, i)
            if p < 0:
                a = datum.simple(i)
                w = tuple(x - p * y for x, y in zip(w, a))
                changed = True
    return w


def is_antidominant(datum: RootDatum, m: LeviSpec, w: Coeffs) -> bool:
    return all(datum.pair(w, i) <= 0 for i in m.labels)


def weyl_dimension(datum: RootDatum, m: LeviSpec, lowest: Coeffs) -> int:
    """Dimension of the irreducible ``m``-module whose lowest weight is ``lowest``."""
    labels = m.ordered(datum)
    if not labels:
        return 1
    sub = datum.sub_datum(labels)
    dsub = sub.symmetrizer
    num = Fraction(1)
    for beta in sub.finite_positive_roots:
        top = sum(Fraction(beta[k] * (1 - datum.pair(lowest, lab)), dsub[k]) for k, lab in enumerate(labels))
        bot = sum(Fraction(beta[k], dsub[k]) for k in range(len(labels)))
        num *= top / bot
    assert num.denominator == 1
    return int(num)


@dataclass
class SplitResult:
    multiplicities: dict[Coeffs, int] = field(default_factory=dict)
    truncated: list[Coeffs] = field(default_factory=list)
    components: list[list[int]] = field(default_factory=list)


def highest_weight_split(bm: BmSubset) -> SplitResult:
    """Connected components of ``B^m`` under the modified ``m``-operations."""
    g = bm.graph
    d = g.datum
    labels = bm.m.ordered(d)
    seen: set[int] = set()
    out = SplitResult()
    mult: dict[Coeffs, int] = defaultdict(int)
    for start in bm.members:
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            k = queue.popleft()
            comp.append(k)
            for i in labels:
                fk = bm.f(i, k)
                if fk is not None and fk not in bm:
                    raise ModelInvariantError(f"f_{i} takes element {k} out of B^m")
                for t in (fk, bm.e(i, k)):
                    if t is not None and t not in seen:
                        seen.add(t)
                        queue.append(t)
        comp.sort()
        out.components.append(comp)
        sources = [k for k in comp if all(bm.f(i, k) is None for i in labels)]
        if len(sources) != 1:
            raise ModelInvariantError(f"component {comp[:5]}... has {len(sources)} f-extremal elements")
        nu = g.weights[sources[0]]
        if any(bm.raises_past_truncation(k) for k in comp):
            out.truncated.append(nu)
            continue
        sinks = [k for k in comp if all(bm.e(i, k) is None for i in labels)]
        if len(sinks) != 1 or len(comp) != weyl_dimension(d, bm.m, nu):
            raise ModelInvariantError(
                f"component with lowest weight {nu} has {len(comp)} elements and {len(sinks)} e-extremal ones"
            )
        mult[nu] += 1
    out.multiplicities = dict(mult)
    return out


def nilradical_roots(datum: RootDatum, m, bound: int):
    """Positive roots outside the Levi ``m`` (with multiplicity), up to ``bound``."""
    m = _levi(datum, m)
    idx = [datum.pos[i] for i in m.labels]
    out = []
    for r in datum.positive_roots(bound):
        if all(r.coeffs[k] == 0 for k in range(datum.n) if k not in idx):
            continue  # a root of the Levi
        out.append(r)
    return out


def hom_multiplicity_oracle(datum: RootDatum, m, nu: Coeffs, max_height: int) -> int | None:
    """Multiplicity of the irreducible ``m``-module with lowest weight ``nu`` in ``U(n(p))``.

    By the Weyl character formula, ``sum_w sign(w) P(nu - (rho - w rho))`` with
    ``P`` the partition function of the nilradical roots.  Returns ``None`` when
    ``nu`` lies above ``max_height`` (undetermined at this truncation).
    """
    m = _levi(datum, m)
    nu = tuple(nu)
    if min(nu) < 0:
        return 0
    if sum(nu) > max_height:
        return None
    if not is_antidominant(datum, m, nu):
        return 0
    roots = nilradical_roots(datum, m, sum(nu))
    total = 0
    for shift, sign in dot_orbit(datum, m.ordered(datum)):
        w = tuple(a - b for a, b in zip(nu, shift))
        if min(w) >= 0:
            total += sign * partition_count(roots, w)
    return total


def c_nu_elements(graph: CrystalGraph, m, nu: Coeffs) -> list[int]:
    """Elements of weight ``nu`` killed by ``f_i`` and ``f*_i`` for all ``i`` in ``m``."""
    m = _levi(graph.datum, m)
    nu = tuple(nu)
    return [
        k
        for k in range(len(graph))
        if graph.weights[k] == nu
        and all(graph.f[i][k] is None and graph.f_star[i][k] is None for i in m.labels)
    ]


@dataclass
class ParabolicRow:
    m: tuple[int, ...]
    nu: Coeffs
    mult_graph: int | None
    mult_char: int | None
    mult_cnu: int
    status: str

    def to_json(self, datum: RootDatum) -> dict:
        return {
            "m": list(self.m),
            "nu": datum.to_weight(self.nu).to_json(),
            "mult_graph": self.mult_graph,
            "mult_char": self.mult_char,
            "mult_cnu": self.mult_cnu,
            "status": self.status,
        }


def parabolic_table(graph: CrystalGraph, m) -> list[ParabolicRow]:
    """Three-way multiplicity table over every ``m``-antidominant ``nu`` in range."""
    d = graph.datum
    m = _levi(d, m)
    split = highest_weight_split(extract_bm(graph, m))
    rows = []
    for nu in _positive_weights(d.n, graph.max_height):
        if not is_antidominant(d, m, nu):
            continue
        cnu = len(c_nu_elements(graph, m, nu))
        char = hom_multiplicity_oracle(d, m, nu, graph.max_height)
        top = dominant_conjugate(d, m, nu)
        if sum(top) <= graph.max_height:
            gm = split.multiplicities.get(nu, 0)
            status = "ok" if gm == char == cnu else "MISMATCH"
        else:
            gm = None
            status = "ok-truncated" if char == cnu else "MISMATCH"
        if gm == char == cnu == 0:
            continue
        rows.append(ParabolicRow(m.ordered(d), nu, gm, char, cnu, status))
    return rows


def check_parabolic(graph: CrystalGraph, m) -> Report:
    m = _levi(graph.datum, m)
    rep = verify_complete_decomposition(graph, m)
    rep.name = f"parabolic m={sorted(m.labels)}"
    for row in parabolic_table(graph, m):
        rep.checked += 1
        if row.status == "MISMATCH":
            rep.add(nu=list(row.nu), graph=row.mult_graph, char=row.mult_char, cnu=row.mult_cnu)
    sub = star_fiber_report(graph, m)
    rep.checked += sub.checked
    rep.violations += sub.violations
    return rep


def peel(graph: CrystalGraph, m: LeviSpec, k: int, reverse: bool = False) -> int:
    """Strip star strings in the ``m``-directions until every ``f*_i`` kills."""
    order = sorted(m.labels, reverse=reverse)
    moved = True
    while moved:
        moved = False
        for i in order:
            t = graph.f_star[i][k]
            if t is not None:
                k, moved = t, True
                break
    return k


def star_fiber_report(graph: CrystalGraph, m) -> Report:
    """Star operations in ``m`` act along the Levi factor only.

    Checks that peeling is order independent, that ``e*_i`` (i in m) does not move
    the peeled element, and that each fibre over ``b`` in ``B^m`` has
    ``|B_m(nu)|`` elements of weight ``wt(b) + nu``.
    """
    d = graph.datum
    m = _levi(d, m)
    rep = Report(f"star-fibres m={sorted(m.labels)}")
    H = graph.max_height
    base = {}
    for k in range(len(graph)):
        rep.checked += 1
        a, b = peel(graph, m, k), peel(graph, m, k, reverse=True)
        if a != b:
            rep.add(element=k, kind="peeling depends on order", first=a, second=b)
        base[k] = a
        if graph.height(k) < H:
            for i in m.labels:
                if peel(graph, m, graph.e_star[i][k]) != a:
                    rep.add(element=k, i=i, kind="e* moved the B^m component")
    fibres: dict[tuple[int, Coeffs], int] = defaultdict(int)
    for k, b in base.items():
        nu = tuple(x - y for x, y in zip(graph.weights[k], graph.weights[b]))
        fibres[(b, nu)] += 1
    levi = levi_graph(graph, m)
    levi_counts = {_embed(d, levi.datum, w): c for w, c in levi.weight_counts().items()}
    for b in extract_bm(graph, m).members:
        for nu, c in levi_counts.items():
            if graph.height(b) + sum(nu) <= H and fibres.get((b, nu), 0) != c:
                rep.add(element=b, nu=list(nu), fibre=fibres.get((b, nu), 0), levi=c)
    return rep
