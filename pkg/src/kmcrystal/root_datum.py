"""Root data for finite and untwisted affine Kac-Moody algebras.

Conventions
-----------
``cartan[i][j] = <alpha_i, alphacheck_j>`` where ``alpha_i`` are the simple
coroots (they live in the coweight lattice ``Lambda``) and ``alphacheck_j`` the
simple roots.  Crystal weights live in ``Lambda``.

The lattice ``Lambda`` is realized in the basis of simple coroots, which is
legitimate because the datum is simply-connected: the coroots span a saturated
sublattice and, after dropping the ``d``-grading factor in the affine case,
they span all of ``Lambda``.  Internally every weight is a tuple of integer
coefficients ``(n_i)`` with ``mu = sum n_i alpha_i`` ("root coordinates").
For affine data the user-facing coordinates are ``(mu_bar, a)`` with
``mu = (mu_bar, a)`` and ``alpha_0 = (-alpha_bar_0, 1)``.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Sequence

Coeffs = tuple[int, ...]

FINITE_FAMILIES = "ABCDEFG"


class RootDatumError(ValueError):
    """Invalid Cartan data or a request outside the supported types."""


def _chain(rank: int) -> list[list[int]]:
    a = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        a[i][i] = 2
        if i + 1 < rank:
            a[i][i + 1] = a[i + 1][i] = -1
    return a


def cartan_matrix(family: str, rank: int) -> tuple[tuple[int, ...], ...]:
    """Bourbaki-numbered Cartan matrix, ``A[i][j] = <alpha_i, alphacheck_j>``."""
    family = family.upper()
    valid = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }
    if family not in valid or not valid[family]:
        raise RootDatumError(f"invalid finite Dynkin type {family}{rank}")
    if family == "G":
        # alpha_1 short
        return ((2, -3), (-1, 2))
    a = _chain(rank)
    if family == "B":
        a[rank - 1][rank - 2] = -2
    elif family == "C":
        a[rank - 2][rank - 1] = -2
    elif family == "D":
        a[rank - 2][rank - 1] = a[rank - 1][rank - 2] = 0
        a[rank - 3][rank - 1] = a[rank - 1][rank - 3] = -1
    elif family == "E":
        # chain 1-3-4-5-6-..., node 2 attached to node 4
        a = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            a[i][i] = 2
        edges = [(1, 3), (3, 4), (4, 5), (2, 4)] + [(k, k + 1) for k in range(5, rank)]
        for p, q in edges:
            a[p - 1][q - 1] = a[q - 1][p - 1] = -1
    elif family == "F":
        a[2][1] = -2
    return tuple(tuple(row) for row in a)


def _validate_cartan(a: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(a)
    if any(len(row) != n for row in a):
        raise RootDatumError("Cartan matrix must be square")
    for i in range(n):
        if a[i][i] != 2:
            raise RootDatumError("Cartan matrix needs 2 on the diagonal")
        for j in range(n):
            if i != j and (a[i][j] > 0 or (a[i][j] == 0) != (a[j][i] == 0)):
                raise RootDatumError(f"bad off-diagonal pair at ({i}, {j})")
    return tuple(tuple(int(x) for x in row) for row in a)


def symmetrizer(a: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Smallest positive integers ``d`` with ``d_i a_ij = d_j a_ji``."""
    n = len(a)
    d: list[Fraction | None] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if i == j or a[i][j] == 0:
                    continue
                val = d[i] * a[i][j] / a[j][i]
                if d[j] is None:
                    d[j] = val
                    queue.append(j)
                elif d[j] != val:
                    raise RootDatumError("Cartan matrix is not symmetrizable")
    # normalize each component so its smallest entry is 1, then clear denominators
    lcm = 1
    for x in d:
        lcm = lcm * x.denominator // _gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in d]
    g = 0
    for x in ints:
        g = _gcd(g, x)
    return tuple(x // g for x in ints)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def is_finite_type(a: Sequence[Sequence[int]]) -> bool:
    """Positive definiteness of the symmetrized matrix (Sylvester minors)."""
    if len(a) == 0:
        return True
    d = symmetrizer(a)
    s = [[Fraction(d[i] * a[i][j]) for j in range(len(a))] for i in range(len(a))]
    return all(_det([row[:k] for row in s[:k]]) > 0 for k in range(1, len(a) + 1))


def is_connected(a: Sequence[Sequence[int]]) -> bool:
    n = len(a)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j not in seen and a[i][j] != 0:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


def root_closure(pairing: Sequence[Sequence[int]]) -> list[Coeffs]:
    """Positive roots of a finite root system by the root-string algorithm.

    ``pairing[i][j]`` is the pairing of simple root ``j`` with coroot ``i``.
    Roots are returned as coefficient tuples, sorted by height.
    """
    n = len(pairing)
    simple = [tuple(int(k == i) for k in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                if beta == simple[i]:
                    continue
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                q = p - sum(beta[j] * pairing[i][j] for j in range(n))
                if q > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
        if len(roots) > 10_000:
            raise RootDatumError("root closure did not terminate; not finite type")
    return sorted(roots, key=lambda r: (sum(r), r))


@dataclass(frozen=True)
class WeightVec:
    """A weight in user coordinates.

    Finite data: coefficients in the simple-coroot basis.  Affine data: the
    finite part followed by the delta coefficient.
    """

    coords: tuple[int, ...]
    affine: bool = False

    @property
    def finite_part(self) -> tuple[int, ...]:
        return self.coords[:-1] if self.affine else self.coords

    @property
    def delta_coeff(self) -> int:
        if not self.affine:
            raise AttributeError("finite weights have no delta coefficient")
        return self.coords[-1]

    def to_json(self):
        if self.affine:
            return {"finite": list(self.finite_part), "delta": self.delta_coeff}
        return list(self.coords)


@dataclass(frozen=True)
class Root:
    coeffs: Coeffs
    multiplicity: int
    height: int


@dataclass(frozen=True, eq=False)
class RootDatum:
    cartan: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...]
    family: str | None = None
    affine: bool = False
    finite: "RootDatum | None" = None
    abar0: Coeffs | None = None  # in the finite simple-coroot basis

    def __post_init__(self):
        _validate_cartan(self.cartan)
        if len(self.labels) != len(self.cartan) or len(set(self.labels)) != len(self.labels):
            raise RootDatumError("labels must be distinct, one per vertex")
        symmetrizer(self.cartan)

    # -- identity -----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, RootDatum) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @cached_property
    def key(self):
        return (self.cartan, self.labels, self.affine)

    @property
    def name(self) -> str:
        base = f"{self.family}{self.rank}" if self.family else f"cartan{list(map(list, self.cartan))}"
        return base + ("^(1)" if self.affine else "")

    @property
    def rank(self) -> int:
        """Rank of the underlying finite datum for affine data."""
        return len(self.labels) - 1 if self.affine else len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def fingerprint(self) -> str:
        return json.dumps(
            {"cartan": [list(r) for r in self.cartan], "labels": list(self.labels), "affine": self.affine},
            separators=(",", ":"),
        )

    def to_json(self) -> dict:
        if self.family:
            return {"family": self.family, "rank": self.rank, "affine": self.affine}
        base = self.finite if self.affine else self
        return {"cartan": [list(r) for r in base.cartan], "affine": self.affine}

    @cached_property
    def pos(self) -> dict[int, int]:
        return {lab: k for k, lab in enumerate(self.labels)}

    @cached_property
    def symmetrizer(self) -> tuple[int, ...]:
        return symmetrizer(self.cartan)

    @property
    def simply_laced(self) -> bool:
        a = self.cartan
        return all(a[i][j] == a[j][i] for i in range(self.n) for j in range(self.n))

    # -- lattice operations -------------------------------------------------
    def simple(self, label: int) -> Coeffs:
        p = self.pos[label]
        return tuple(int(k == p) for k in range(self.n))

    def zero(self) -> Coeffs:
        return (0,) * self.n

    def pair(self, mu: Sequence, label: int):
        """``<mu, alphacheck_label>`` for ``mu`` in root coordinates."""
        j = self.pos[label]
        return sum(mu[k] * self.cartan[k][j] for k in range(self.n))

    def to_weight(self, coeffs: Sequence[int]) -> WeightVec:
        coeffs = tuple(coeffs)
        if not self.affine:
            return WeightVec(coeffs)
        a = coeffs[0]
        bar = tuple(coeffs[k + 1] - a * self.abar0[k] for k in range(self.rank))
        return WeightVec(bar + (a,), affine=True)

    def from_weight(self, mu: WeightVec | Sequence) -> Coeffs:
        """Coefficients of ``mu`` in the simple coroots; raises if not integral."""
        coords = mu.coords if isinstance(mu, WeightVec) else tuple(mu)
        if len(coords) != self.n:
            raise RootDatumError(f"weight {coords} has length {len(coords)}, expected {self.n}")
        for c in coords:
            if Fraction(c).denominator != 1:
                raise RootDatumError(f"weight {coords} is outside the span of the simple coroots")
        coords = tuple(int(c) for c in coords)
        if not self.affine:
            return coords
        a = coords[-1]
        return (a,) + tuple(coords[k] + a * self.abar0[k] for k in range(self.rank))

    def is_positive(self, mu: WeightVec | Sequence) -> tuple[bool, Coeffs | None]:
        """Whether ``mu`` lies in ``Lambda^pos``; also returns its coefficients."""
        n = self.from_weight(mu)
        if all(x >= 0 for x in n):
            return True, n
        return False, None

    def length(self, mu: WeightVec | Sequence) -> int:
        ok, n = self.is_positive(mu)
        if not ok:
            raise RootDatumError(f"{mu} is not in Lambda^pos")
        return sum(n)

    def rho_check_pairing(self, mu: WeightVec | Sequence) -> int:
        # <alpha_i, rhocheck> = 1 for every i
        return sum(self.from_weight(mu))

    # -- finite-type structure ---------------------------------------------
    def _require_finite(self):
        if self.affine:
            raise RootDatumError("operation needs a finite datum")

    @cached_property
    def finite_positive_roots(self) -> tuple[Coeffs, ...]:
        """Positive roots in ``Lambda`` (the coroots of g), finite type only."""
        self._require_finite()
        a = self.cartan
        return tuple(root_closure([[a[j][i] for j in range(self.n)] for i in range(self.n)]))

    @cached_property
    def dual_positive_roots(self) -> tuple[Coeffs, ...]:
        """Positive roots of g in ``Lambdacheck`` (basis of simple roots)."""
        self._require_finite()
        return tuple(root_closure(self.cartan))

    def sub_datum(self, labels: Iterable[int]) -> "RootDatum":
        labels = tuple(sorted(labels, key=lambda x: self.pos[x]))
        idx = [self.pos[x] for x in labels]
        sub = tuple(tuple(self.cartan[i][j] for j in idx) for i in idx)
        if labels and not is_finite_type(sub):
            raise RootDatumError(f"sub-diagram {labels} is not of finite type")
        return RootDatum(sub, labels)

    def highest_root(self) -> Coeffs:
        """Highest root of g, in the basis of simple roots (finite, irreducible)."""
        return max(self.dual_positive_roots, key=sum)

    def is_long_simple_root(self, label: int) -> bool:
        return self.symmetrizer[self.pos[label]] == max(self.symmetrizer)

    @property
    def lacing(self) -> int:
        d = self.symmetrizer
        return max(d) // min(d)

    def norm(self, mu: Sequence) -> Fraction:
        """Invariant form on ``Lambda`` with ``(alpha_i, alpha_i) = 2 / d_i``."""
        d = self.symmetrizer
        return sum(
            Fraction(mu[i] * mu[j] * self.cartan[i][j], d[j]) for i in range(self.n) for j in range(self.n)
        )

    def exponents(self) -> tuple[int, ...]:
        """Exponents from the height distribution of the positive roots."""
        self._require_finite()
        if not is_connected(self.cartan):
            raise RootDatumError("exponents need an irreducible datum")
        counts: dict[int, int] = {}
        for r in self.finite_positive_roots:
            counts[sum(r)] = counts.get(sum(r), 0) + 1
        top = max(counts)
        out = []
        for h in range(1, top + 1):
            out += [h] * (counts.get(h, 0) - counts.get(h + 1, 0))
        return tuple(sorted(out))

    # -- affine structure -----------------------------------------------------
    @property
    def delta(self) -> Coeffs:
        if not self.affine:
            raise RootDatumError("delta exists only for affine data")
        return (1,) + self.abar0

    def dual_coxeter(self) -> int:
        """``1 + <alpha_bar_0, rhocheck>`` (finite or affine input)."""
        base = self.finite if self.affine else self
        if self.affine:
            return 1 + sum(self.abar0)
        return 1 + sum(affinize(base).abar0)

    # -- positive roots with multiplicity --------------------------------------
    def positive_roots(self, height_bound: int | None = None) -> list[Root]:
        if not self.affine:
            roots = [Root(r, 1, sum(r)) for r in self.finite_positive_roots]
            return [r for r in roots if height_bound is None or r.height <= height_bound]
        if height_bound is None:
            raise RootDatumError("affine root systems are infinite; give a height bound")
        return list(_affine_positive_roots(self, height_bound))

    def kostant_partition(self, lam: WeightVec | Sequence) -> int:
        """Colored multisets of positive roots summing to ``lam``."""
        try:
            ok, n = self.is_positive(lam)
        except RootDatumError:
            raise
        if not ok:
            return 0
        roots = [r for r in self.positive_roots(sum(n)) if all(a <= b for a, b in zip(r.coeffs, n))]
        return partition_count(roots, n)


def _affine_positive_roots(d: RootDatum, bound: int):
    fin = d.finite
    h = sum(d.delta)
    r = fin.lacing
    longest = max(fin.norm(b) for b in fin.finite_positive_roots)
    n_short_simple = sum(1 for lab in fin.labels if fin.is_long_simple_root(lab))
    out = []
    signed = [(b, 1) for b in fin.finite_positive_roots] + [(b, -1) for b in fin.finite_positive_roots]
    for beta, sign in signed:
        long_in_lambda = fin.norm(beta) == longest and r > 1
        ht = sign * sum(beta)
        l = 0 if sign > 0 else 1
        while ht + l * h <= bound:
            if not long_in_lambda or l % r == 0:
                coeffs = (l,) + tuple(sign * beta[k] + l * d.abar0[k] for k in range(fin.n))
                out.append(Root(coeffs, 1, ht + l * h))
            l += 1
    l = 1
    while l * h <= bound:
        mult = fin.rank if l % r == 0 else n_short_simple
        out.append(Root(tuple(l * x for x in d.delta), mult, l * h))
        l += 1
    out.sort(key=lambda x: (x.height, x.coeffs))
    return out


def partition_count(roots: Sequence[Root], target: Sequence[int]) -> int:
    """Count colored multisets of ``roots`` summing to ``target`` (direct recursion)."""
    target = tuple(target)
    roots = [r for r in roots if all(a <= b for a, b in zip(r.coeffs, target))]

    @lru_cache(maxsize=None)
    def count(rest: tuple[int, ...], k: int) -> int:
        if not any(rest):
            return 1
        if k == len(roots):
            return 0
        r = roots[k]
        total = 0
        c = 0
        cur = rest
        while all(x >= 0 for x in cur):
            total += comb(r.multiplicity + c - 1, c) * count(cur, k + 1)
            c += 1
            cur = tuple(x - y for x, y in zip(cur, r.coeffs))
        return total

    return count(target, 0)


def build_finite(family: str, rank: int) -> RootDatum:
    return RootDatum(cartan_matrix(family, rank), tuple(range(1, rank + 1)), family.upper())


def from_cartan(matrix: Sequence[Sequence[int]]) -> RootDatum:
    a = _validate_cartan(matrix)
    if not a:
        raise RootDatumError("empty Cartan matrix")
    if not is_finite_type(a):
        raise RootDatumError("only finite-type Cartan matrices are accepted; use affine=true to affinize")
    return RootDatum(a, tuple(range(1, len(a) + 1)))


def affinize(d: RootDatum) -> RootDatum:
    """Untwisted affinization; label 0 is the affine node, stored first."""
    if d.affine:
        raise RootDatumError("datum is already affine")
    if not is_connected(d.cartan):
        raise RootDatumError("affinization needs an irreducible datum")
    theta = d.highest_root()
    sym = d.symmetrizer
    d_theta = max(sym)
    abar0 = tuple(Fraction(theta[k] * sym[k], d_theta) for k in range(d.n))
    assert all(x.denominator == 1 for x in abar0)
    abar0 = tuple(int(x) for x in abar0)
    n = d.n + 1
    a = [[0] * n for _ in range(n)]
    a[0][0] = 2
    for j in range(d.n):
        a[0][j + 1] = -sum(abar0[k] * d.cartan[k][j] for k in range(d.n))
        a[j + 1][0] = -sum(theta[k] * d.cartan[j][k] for k in range(d.n))
        for k in range(d.n):
            a[j + 1][k + 1] = d.cartan[j][k]
    return RootDatum(
        tuple(tuple(r) for r in a), (0,) + d.labels, d.family, affine=True, finite=d, abar0=abar0
    )


def from_json(spec: dict) -> RootDatum:
    """``{"family": "A", "rank": 2, "affine": false}`` or ``{"cartan": [[...]], "affine": true}``."""
    if "cartan" in spec:
        base = from_cartan(spec["cartan"])
    elif "family" in spec and "rank" in spec:
        base = build_finite(str(spec["family"]), int(spec["rank"]))
    else:
        raise RootDatumError("root-datum JSON needs 'family'+'rank' or 'cartan'")
    return affinize(base) if spec.get("affine") else base


def weight_from_json(d: RootDatum, obj) -> WeightVec:
    if isinstance(obj, dict):
        if not d.affine:
            raise RootDatumError("affine weight given for a finite datum")
        return WeightVec(tuple(obj["finite"]) + (int(obj["delta"]),), affine=True)
    return WeightVec(tuple(obj), affine=d.affine)


# -- series oracles --------------------------------------------------------------


def dot_orbit(d: RootDatum, labels: Iterable[int] | None = None, bound: int | None = None):
    """Pairs ``(rho - w rho, sign(w))`` for ``w`` in the Weyl group of ``labels``.

    Computed with the dot action ``s_i . lam = lam - (<lam, alphacheck_i> + 1) alpha_i``
    starting from 0, which needs no ``rho`` in the lattice.  ``bound`` truncates by
    height; it is required when the subgroup is infinite.
    """
    labels = tuple(d.labels if labels is None else labels)
    start = d.zero()
    seen = {start: 1}
    queue = deque([start])
    while queue:
        lam = queue.popleft()
        for i in labels:
            c = d.pair(tuple(-x for x in lam), i) + 1
            nxt = tuple(x + c * y for x, y in zip(lam, d.simple(i)))
            if nxt in seen or (bound is not None and sum(nxt) > bound):
                continue
            seen[nxt] = -seen[lam]
            queue.append(nxt)
            if bound is None and len(seen) > 1_000_000:
                raise RootDatumError("Weyl group too large; give a bound")
    return sorted(seen.items(), key=lambda kv: (sum(kv[0]), kv[0]))


def _mul_truncated(p: dict, q: dict, bound: int) -> dict:
    out: dict = {}
    for a, x in p.items():
        ha = sum(a)
        for b, y in q.items():
            if ha + sum(b) > bound:
                continue
            k = tuple(u + v for u, v in zip(a, b))
            out[k] = out.get(k, 0) + x * y
    return {k: v for k, v in out.items() if v}


def denominator_product(d: RootDatum, bound: int) -> dict:
    """Truncation of ``prod_{beta > 0} (1 - e^beta)^mult(beta)``."""
    series = {d.zero(): 1}
    for r in d.positive_roots(bound):
        factor = {d.zero(): 1}
        for k in range(1, r.multiplicity + 1):
            kb = tuple(k * x for x in r.coeffs)
            if sum(kb) > bound:
                break
            factor[kb] = (-1) ** k * comb(r.multiplicity, k)
        series = _mul_truncated(series, factor, bound)
    return series


def weyl_kac_denominator(d: RootDatum, bound: int) -> dict:
    """The alternating Weyl-group sum ``sum_w sign(w) e^{rho - w rho}``, truncated."""
    return {k: v for k, v in dot_orbit(d, bound=bound)}


def inverse_denominator(d: RootDatum, bound: int) -> dict:
    """Truncation of ``prod_{beta > 0} (1 - e^beta)^{-mult(beta)}``."""
    series = {d.zero(): 1}
    for r in d.positive_roots(bound):
        factor = {}
        k = 0
        while k * r.height <= bound:
            factor[tuple(k * x for x in r.coeffs)] = comb(r.multiplicity + k - 1, k)
            k += 1
        series = _mul_truncated(series, factor, bound)
    return series
