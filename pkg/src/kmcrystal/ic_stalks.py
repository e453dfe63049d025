"""Character-level stalk formulas for Uhlenbeck-type spaces.

Polynomials in ``q`` are dicts ``{exponent: coefficient}``; bigraded series are
dicts ``{(q_exponent, l): coefficient}``.  Everything is exact integer
arithmetic and every truncation is an explicit argument.

Normalization: a kernel generator of exponent ``m`` at loop degree ``l``
contributes ``q^(2m) t^l``.  With this choice the one-point answer divided by
``q^2`` is the Poincare polynomial of the minimal nilpotent orbit closure stalk.
The absolute offset against perverse normalization is not fixed here.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .root_datum import Coeffs, RootDatum, RootDatumError, dot_orbit

QPoly = dict[int, int]
Series = dict[tuple[int, int], int]

DUAL_TWIST = "dual-twist unimplemented: the Langlands dual of a non-simply-laced affine algebra is twisted"


def _require_simply_laced(d: RootDatum) -> None:
    if d.affine:
        raise RootDatumError("give the finite datum; the loop direction is handled here")
    if not d.simply_laced:
        raise RootDatumError(DUAL_TWIST)


def _clean(p: dict) -> dict:
    return {k: v for k, v in sorted(p.items()) if v}


def format_qpoly(p: QPoly) -> str:
    terms = []
    for e, c in sorted(p.items()):
        if not c:
            continue
        mono = "1" if e == 0 else ("q" if e == 1 else f"q^{e}")
        terms.append(mono if c == 1 else (str(c) if e == 0 else f"{c}*{mono}"))
    return " + ".join(terms) if terms else "0"


# -- principal sl2 -------------------------------------------------------------


def adjoint_qchar(d: RootDatum) -> QPoly:
    """Principal-grading character of the adjoint module: root height ``h`` sits at ``q^(2h)``."""
    d._require_finite()
    out: dict[int, int] = defaultdict(int)
    out[0] += d.rank
    for r in d.dual_positive_roots:
        out[2 * sum(r)] += 1
        out[-2 * sum(r)] += 1
    return _clean(out)


def string_qchar(m: int) -> QPoly:
    return {e: 1 for e in range(-m, m + 1, 2)}


def sl2_string_decompose(c: QPoly) -> list[int]:
    """Top-down peeling into strings ``q^-m + ... + q^m``; returns the ``m`` (descending)."""
    rest = dict(c)
    if any(v < 0 for v in rest.values()):
        raise ValueError("negative coefficient: not a module character")
    for e, v in rest.items():
        if rest.get(-e, 0) != v:
            raise ValueError("character is not symmetric under q <-> 1/q")
    out = []
    while any(rest.values()):
        top = max(e for e, v in rest.items() if v)
        if top < 0:
            raise ValueError("residue is not a sum of strings")
        k = rest[top]
        for e in range(-top, top + 1, 2):
            rest[e] = rest.get(e, 0) - k
            if rest[e] < 0:
                raise ValueError(f"residue negative at q^{e}: not a module character")
        out += [top] * k
    return out


def reassemble(strings: Iterable[int]) -> QPoly:
    out: dict[int, int] = defaultdict(int)
    for m in strings:
        for e, v in string_qchar(m).items():
            out[e] += v
    return _clean(out)


def vf_generators(d: RootDatum, l_max: int = 1) -> list[tuple[int, int]]:
    """Pairs ``(exponent, l)`` for the kernel of a principal nilpotent on each loop level."""
    _require_simply_laced(d)
    strings = sl2_string_decompose(adjoint_qchar(d))
    exps = sorted(m // 2 for m in strings)
    return [(m, l) for l in range(1, l_max + 1) for m in exps]


def sym_vf_series(d: RootDatum, l_max: int) -> Series:
    """``prod_{m, l <= l_max} (1 - q^(2m) t^l)^-1`` truncated at ``t^l_max``."""
    series: Series = {(0, 0): 1}
    for m, l in vf_generators(d, l_max):
        # multiply by a geometric series; ascending t-degree makes one pass enough
        new = dict(series)
        for t in range(l, l_max + 1):
            for (qe, tl), c in list(new.items()):
                if tl == t - l:
                    k = (qe + 2 * m, t)
                    new[k] = new.get(k, 0) + c
        series = new
    return dict(sorted(series.items(), key=lambda kv: (kv[0][1], kv[0][0])))


def t_coefficient(series: Series, l: int) -> QPoly:
    return _clean({qe: c for (qe, tl), c in series.items() if tl == l})


@dataclass(frozen=True)
class Partition:
    """``b = sum n_k d_k`` with distinct parts ``d_k``."""

    parts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ds = [p for p, _ in self.parts]
        if len(set(ds)) != len(ds):
            raise ValueError("partition parts must be distinct")
        if any(p <= 0 or n <= 0 for p, n in self.parts):
            raise ValueError("partition parts and multiplicities must be positive")

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """From ``"d:n,d:n"``."""
        parts = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                p, _, n = chunk.partition(":")
                parts.append((int(p), int(n) if n else 1))
            except ValueError:
                raise ValueError(f"bad partition part {chunk!r}; expected d:n") from None
        if not parts:
            raise ValueError("empty partition")
        return cls(tuple(sorted(parts)))

    @property
    def total(self) -> int:
        return sum(p * n for p, n in self.parts)

    @property
    def size(self) -> int:
        return sum(n for _, n in self.parts)

    def __str__(self) -> str:
        return ",".join(f"{p}:{n}" for p, n in self.parts)


def _qmul(a: QPoly, b: QPoly) -> QPoly:
    out: dict[int, int] = defaultdict(int)
    for x, u in a.items():
        for y, v in b.items():
            out[x + y] += u * v
    return _clean(out)


def stalk_polynomial(d: RootDatum, part: Partition, series: Series | None = None) -> QPoly:
    """``prod_k ([t^(d_k)] Z)^(n_k)``."""
    _require_simply_laced(d)
    top = max(p for p, _ in part.parts)
    series = series or sym_vf_series(d, top)
    out: QPoly = {0: 1}
    for p, n in part.parts:
        piece = t_coefficient(series, p)
        for _ in range(n):
            out = _qmul(out, piece)
    return out


def normalized_point_stalk(d: RootDatum) -> QPoly:
    """One-point stalk divided by ``q^2``."""
    raw = stalk_polynomial(d, Partition(((1, 1),)))
    return {e - 2: c for e, c in raw.items()}


def exponent_polynomial(d: RootDatum) -> QPoly:
    """``sum_m q^(2(m-1))`` over the exponents (independent of the series)."""
    out: dict[int, int] = defaultdict(int)
    for m in d.exponents():
        out[2 * (m - 1)] += 1
    return _clean(out)


# -- parabolic nilradicals -----------------------------------------------------


def _levi_labels(d: RootDatum, m) -> tuple[int, ...]:
    labels = frozenset(m.labels if hasattr(m, "labels") else m)
    if not labels <= set(d.labels):
        raise RootDatumError(f"Levi labels {sorted(labels)} not in {d.labels}")
    d.sub_datum(labels)
    return tuple(x for x in d.labels if x in labels)


def project(d: RootDatum, m, mubar: Sequence[int], l: int) -> tuple[int, ...]:
    """Image of ``mubar + l delta`` in the lattice with the ``m``-directions divided out.

    Coordinates are the affine simple-root coefficients off ``m``: ``(l, n_j)`` with
    ``n_j = mubar_j + l theta_j``.
    """
    labels = set(_levi_labels(d, m))
    theta = d.highest_root()
    return (l,) + tuple(mubar[k] + l * theta[k] for k, j in enumerate(d.labels) if j not in labels)


def _levi_shifts(d: RootDatum, labels: tuple[int, ...]):
    return dot_orbit(d, labels)


def highest_dimension(d: RootDatum, labels: tuple[int, ...], lam: Sequence[int]) -> int:
    """Weyl dimension of the Levi irreducible with highest weight ``lam`` (simply laced)."""
    if not labels:
        return 1
    sub = d.sub_datum(labels)
    out = Fraction(1)
    for beta in sub.dual_positive_roots:
        out *= Fraction(sum(c * (1 + d.pair(lam, lab)) for c, lab in zip(beta, labels)), sum(beta))
    return int(out)


def decompose_levi(d: RootDatum, m, char: dict[Coeffs, int]) -> dict[Coeffs, int]:
    """Highest weights (with multiplicity) of a finite Levi character given by weight multiplicities.

    ``mult(lam) = sum_w sign(w) char(lam + rho - w rho)``; the result is checked by
    comparing total dimensions.
    """
    labels = _levi_labels(d, m)
    shifts = _levi_shifts(d, labels)
    out = {}
    for lam in sorted(char):
        if any(d.pair(lam, i) < 0 for i in labels):
            continue
        c = 0
        for shift, sign in shifts:
            c += sign * char.get(tuple(a + b for a, b in zip(lam, shift)), 0)
        if c < 0:
            raise ValueError(f"negative multiplicity at {lam}: not a module character")
        if c:
            out[lam] = c
    if sum(c * highest_dimension(d, labels, lam) for lam, c in out.items()) != sum(char.values()):
        raise ValueError("character does not decompose into Levi irreducibles")
    return out


def vp_weights(d: RootDatum, m, l: int) -> dict[Coeffs, int]:
    """Weights of the nilradical of the affine parabolic at loop degree ``l``."""
    _require_simply_laced(d)
    labels = set(_levi_labels(d, m))
    out: dict[Coeffs, int] = defaultdict(int)
    if l == 0:
        for r in d.dual_positive_roots:
            if any(c and j not in labels for c, j in zip(r, d.labels)):
                out[r] += 1
        return dict(out)
    for r in d.dual_positive_roots:
        out[r] += 1
        out[tuple(-c for c in r)] += 1
    out[d.zero()] += d.rank
    return dict(out)


def vp_character(d: RootDatum, m, l_max: int) -> list[dict]:
    """Levi decomposition of each graded piece, grouped by central character."""
    labels = _levi_labels(d, m)
    rows = []
    for l in range(l_max + 1):
        groups: dict[tuple, dict] = defaultdict(dict)
        for w, c in vp_weights(d, labels, l).items():
            groups[project(d, labels, w, l)][w] = c
        for theta in sorted(groups):
            dec = decompose_levi(d, labels, groups[theta])
            rows.append(
                {
                    "l": l,
                    "theta": list(theta),
                    "irreps": [
                        {"highest": list(lam), "dim": highest_dimension(d, labels, lam), "mult": c}
                        for lam, c in sorted(dec.items())
                    ],
                }
            )
    return rows


def sym_vp_series(d: RootDatum, m, theta: tuple[Sequence[int], int], i_max: int) -> dict:
    """``Sym^i(V_p)[2i]`` at central character ``theta = (mubar, l)``, decomposed over the Levi.

    Every weight of ``V_p`` has projected height ``>= 1``, so ``Sym^i`` meets ``theta``
    only for ``i <= height``; below that ``i_max`` leaves the answer undetermined.
    """
    _require_simply_laced(d)
    labels = _levi_labels(d, m)
    mubar, level = theta
    target = project(d, labels, mubar, level)
    if min(target) < 0:
        raise RootDatumError(f"central character {list(target)} is not positive")
    H = sum(target)
    gens = []
    for l in range(level + 1):
        for w, c in vp_weights(d, labels, l).items():
            p = project(d, labels, w, l)
            if all(a <= b for a, b in zip(p, target)):
                gens.append(((w, l), p, c))
    # states (i, mubar, l) bucketed by projected height; unbounded knapsack per colour
    buckets: list[dict] = [defaultdict(int) for _ in range(H + 1)]
    buckets[0][(0, d.zero(), 0)] = 1
    for (w, l), p, c in gens:
        hg = sum(p)
        for _ in range(c):
            for h in range(H + 1 - hg):
                for (i, mu, lv), cnt in list(buckets[h].items()):
                    if i >= i_max:
                        continue
                    nmu = tuple(a + b for a, b in zip(mu, w))
                    if all(a <= b for a, b in zip(project(d, labels, nmu, lv + l), target)):
                        buckets[h + hg][(i + 1, nmu, lv + l)] += cnt
    by_i: dict[int, dict] = defaultdict(dict)
    for (i, mu, lv), cnt in buckets[H].items():
        if cnt and project(d, labels, mu, lv) == target:
            by_i[i][mu] = by_i[i].get(mu, 0) + cnt
    terms = []
    for i in sorted(by_i):
        for lam, c in sorted(decompose_levi(d, labels, by_i[i]).items()):
            terms.append({"i": i, "shift": 2 * i, "highest": list(lam), "dim": highest_dimension(d, labels, lam), "mult": c})
    return {"theta": list(target), "i_max": i_max, "determined": i_max >= H, "terms": terms}


# -- dimension formulas --------------------------------------------------------


def zastava_dims(d: RootDatum, m, theta: Sequence[int]) -> dict:
    """``|theta|``, ``<theta~, rhocheck_M>`` and ``2|theta|'`` for ``theta~ = sum_{i not in m} n_i alpha_i``."""
    d._require_finite()
    labels = set(_levi_labels(d, m))
    theta = tuple(theta)
    if len(theta) != d.n or min(theta) < 0 or not any(theta):
        raise RootDatumError(f"theta {list(theta)} must be a nonzero positive combination")
    if any(theta[d.pos[i]] for i in labels):
        raise RootDatumError("theta~ must be supported off the Levi labels")
    length = sum(theta)
    rho_m = Fraction(0)
    if labels:
        sub = d.sub_datum(labels)
        for beta in sub.dual_positive_roots:
            for c, lab in zip(beta, sub.labels):
                rho_m += Fraction(c * d.pair(theta, lab), 2)
    prime = length - rho_m
    return {"length": length, "rho_M_pairing": rho_m, "length_prime": prime, "dimension": 2 * prime}


def bundle_dimension(d: RootDatum, a: int) -> int:
    """``2 hcheck a``."""
    if a < 0:
        raise ValueError("a must be non-negative")
    return 2 * d.dual_coxeter() * a


def grassmannian_intersection_dim(d: RootDatum, lam1: Sequence[int], lam2: Sequence[int]) -> int:
    """``<lam1 - lam2, rhocheck>`` for ``lam1 - lam2`` positive."""
    diff = tuple(a - b for a, b in zip(lam1, lam2))
    return d.length(diff)


def cartier_vanishing_order(n: int) -> int:
    if n < 0:
        raise ValueError("n must be non-negative")
    return n * (n + 1) * (n + 2) // 6


def filtration_sum(n: int) -> int:
    """``sum_{j=1}^n j (n - j + 1)``, the count along the n-step filtration."""
    return sum(j * (n - j + 1) for j in range(1, n + 1))
