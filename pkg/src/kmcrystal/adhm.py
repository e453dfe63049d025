"""Linear-algebra side of the ADHM description: moment map, stability, monad, invariants.

Matrices are sympy matrices over the rationals, so every identity is checked
as an exact equality.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass

import sympy as sp

z0, z1, z2 = sp.symbols("z0 z1 z2")
X = sp.Symbol("x")


class ADHMError(ValueError):
    pass


@dataclass
class ADHMDatum:
    """``B1, B2 : V -> V``, ``i : W -> V``, ``j : V -> W`` with ``dim V = a``, ``dim W = n``."""

    B1: sp.Matrix
    B2: sp.Matrix
    i: sp.Matrix
    j: sp.Matrix

    def __post_init__(self):
        a = self.B1.rows
        n = self.i.cols
        shapes = {"B1": (a, a), "B2": (a, a), "i": (a, n), "j": (n, a)}
        for name, want in shapes.items():
            got = getattr(self, name).shape
            if got != want:
                raise ADHMError(f"{name} has shape {got}, expected {want}")

    @property
    def a(self) -> int:
        return self.B1.rows

    @property
    def n(self) -> int:
        return self.i.cols

    @classmethod
    def from_json(cls, obj: dict) -> "ADHMDatum":
        try:
            a, n = int(obj["a"]), int(obj["n"])
            mats = {}
            for key, shape in (("B1", (a, a)), ("B2", (a, a)), ("i", (a, n)), ("j", (n, a))):
                rows = obj[key]
                if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
                    raise ADHMError(f"{key} must be {shape[0]}x{shape[1]}")
                mats[key] = sp.Matrix(shape[0], shape[1], lambda r, c: sp.Rational(str(rows[r][c])))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ADHMError):
                raise
            raise ADHMError(f"bad ADHM datum: {exc}") from None
        return cls(mats["B1"], mats["B2"], mats["i"], mats["j"])

    def to_json(self) -> dict:
        def rows(m):
            return [[str(m[r, c]) for c in range(m.cols)] for r in range(m.rows)]

        return {"a": self.a, "n": self.n, "B1": rows(self.B1), "B2": rows(self.B2), "i": rows(self.i), "j": rows(self.j)}

    def conjugate(self, g: sp.Matrix) -> "ADHMDatum":
        """Action of ``g`` in ``GL(V)``."""
        gi = g.inv()
        return ADHMDatum(g * self.B1 * gi, g * self.B2 * gi, g * self.i, self.j * gi)

    def direct_sum(self, other: "ADHMDatum") -> "ADHMDatum":
        """Sum of two data sharing the framing ``W`` (``i`` stacked, ``j`` side by side)."""
        if self.n != other.n:
            raise ADHMError("direct sum needs equal framing dimension")
        return ADHMDatum(
            sp.diag(self.B1, other.B1),
            sp.diag(self.B2, other.B2),
            sp.Matrix.vstack(self.i, other.i),
            sp.Matrix.hstack(self.j, other.j),
        )


def moment_residual(x: ADHMDatum) -> sp.Matrix:
    return x.B1 * x.B2 - x.B2 * x.B1 + x.i * x.j


def _saturate(gens: sp.Matrix, ops: list[sp.Matrix], a: int) -> int:
    """Dimension of the smallest subspace containing the columns of ``gens`` and stable under ``ops``."""
    if a == 0 or gens.cols == 0:
        return 0
    span = gens
    r = span.rank()
    for _ in range(a):
        grown = sp.Matrix.hstack(span, *[op * span for op in ops])
        new_r = grown.rank()
        if new_r == r:
            break
        span = sp.Matrix.hstack(*grown.columnspace())
        r = new_r
    return r


def is_stable(x: ADHMDatum) -> bool:
    """No proper ``B``-invariant subspace contains ``im(i)``."""
    return _saturate(x.i, [x.B1, x.B2], x.a) == x.a


def is_costable(x: ADHMDatum) -> bool:
    """``ker(j)`` contains no nonzero ``B``-invariant subspace (stability of the transpose)."""
    return _saturate(x.j.T, [x.B1.T, x.B2.T], x.a) == x.a


def monad(x: ADHMDatum) -> tuple[sp.Matrix, sp.Matrix]:
    """``d : V -> V+V+W`` and ``b : V+V+W -> V`` with entries linear in ``z0, z1, z2``."""
    one = sp.eye(x.a)
    d = sp.Matrix.vstack(z0 * x.B1 - z1 * one, z0 * x.B2 - z2 * one, z0 * x.j)
    b = sp.Matrix.hstack(-z0 * x.B2 + z2 * one, z0 * x.B1 - z1 * one, z0 * x.i)
    return d, b


def monad_identity_check(x: ADHMDatum) -> tuple[sp.Matrix, sp.Matrix, bool]:
    """``b d`` against ``z0^2 ([B1, B2] + i j)``, both expanded."""
    d, b = monad(x)
    lhs = (b * d).applyfunc(sp.expand)
    rhs = (z0**2 * moment_residual(x)).applyfunc(sp.expand)
    return lhs, rhs, all(sp.expand(e) == 0 for e in lhs - rhs)


def charpoly_projections(x: ADHMDatum) -> tuple[sp.Poly, sp.Poly]:
    return x.B1.charpoly(X), x.B2.charpoly(X)


def _words(alphabet: str, max_len: int, min_len: int = 0):
    for k in range(min_len, max_len + 1):
        for w in itertools.product(alphabet, repeat=k):
            yield "".join(w)


def _eval_word(word: str, mats: dict[str, sp.Matrix], a: int) -> sp.Matrix:
    out = sp.eye(a)
    for ch in word:
        out = out * mats[ch]
    return out


def invariants(x: ADHMDatum, max_word_length: int) -> dict[str, object]:
    """Matrix coefficients of ``j w(B1,B2) i`` and traces of words in ``B1, B2, ij``.

    Keys are ``"T_W[w][r,c]"`` and ``"tr[w]"`` with words over ``1, 2`` (and ``p`` for
    ``ij``), listed by length then lexicographically.
    """
    mats = {"1": x.B1, "2": x.B2, "p": x.i * x.j}
    out: dict[str, object] = {}
    for w in _words("12", max_word_length):
        m = x.j * _eval_word(w, mats, x.a) * x.i
        for r in range(x.n):
            for c in range(x.n):
                out[f"T_W[{w or 'e'}][{r},{c}]"] = m[r, c]
    for w in _words("12p", max_word_length, 1):
        out[f"tr[{w}]"] = _eval_word(w, mats, x.a).trace()
    return out


def invariants_table(x: ADHMDatum, max_word_length: int) -> list[tuple[str, str]]:
    return [(k, str(v)) for k, v in invariants(x, max_word_length).items()]


# -- test data -----------------------------------------------------------------


def random_rational(rng: random.Random, spread: int = 5) -> sp.Rational:
    return sp.Rational(rng.randint(-spread, spread), rng.randint(1, 3))


def random_matrix(rng: random.Random, rows: int, cols: int) -> sp.Matrix:
    return sp.Matrix(rows, cols, lambda r, c: random_rational(rng))


def random_datum(rng: random.Random, a: int, n: int) -> ADHMDatum:
    return ADHMDatum(random_matrix(rng, a, a), random_matrix(rng, a, a), random_matrix(rng, a, n), random_matrix(rng, n, a))


def random_invertible(rng: random.Random, a: int) -> sp.Matrix:
    while True:
        g = random_matrix(rng, a, a)
        if g.det() != 0:
            return g


def random_moment_solution(rng: random.Random, a: int, n: int = 1) -> ADHMDatum:
    """A point of ``[B1, B2] + ij = 0`` with ``j w i = 0`` for every word, generic-ish.

    Block upper triangular ``B_k = [[x_k, u_k^T], [0, D_k]]`` with commuting ``D``'s;
    ``i`` is the first basis vector, ``j`` cancels the first row of the commutator.
    Conjugated by a random element of ``GL(V)`` at the end.
    """
    if a < 1:
        raise ADHMError("need a >= 1")
    m = a - 1
    # commuting D's: polynomials in one matrix
    base = random_matrix(rng, m, m)
    D1 = sp.zeros(m, m)
    D2 = sp.zeros(m, m)
    for k in range(3):
        D1 += random_rational(rng) * base**k
        D2 += random_rational(rng) * base**k
    B1 = sp.zeros(a, a)
    B2 = sp.zeros(a, a)
    B1[0, 0], B2[0, 0] = random_rational(rng), random_rational(rng)
    if m:
        B1[0, 1:] = random_matrix(rng, 1, m)
        B2[0, 1:] = random_matrix(rng, 1, m)
        B1[1:, 1:] = D1
        B2[1:, 1:] = D2
    comm = B1 * B2 - B2 * B1
    i = sp.zeros(a, n)
    i[0, 0] = 1
    j = sp.zeros(n, a)
    j[0, :] = -comm[0, :]
    x = ADHMDatum(B1, B2, i, j)
    assert moment_residual(x).is_zero_matrix
    return x.conjugate(random_invertible(rng, a))


def noncommuting_solution() -> ADHMDatum:
    """``a = 2``: ``B1 = E12``, ``B2 = E22``, ``i = e1``, ``j = -e2^T``."""
    return ADHMDatum(
        sp.Matrix([[0, 1], [0, 0]]), sp.Matrix([[0, 0], [0, 1]]), sp.Matrix([[1], [0]]), sp.Matrix([[0, -1]])
    )


def trace_reordering_report(x: ADHMDatum, max_degree: int = 4) -> list[dict]:
    """Words in ``B1, B2`` of equal letter counts whose traces differ (empty when all agree)."""
    mats = {"1": x.B1, "2": x.B2}
    bad = []
    for k in range(1, max_degree + 1):
        by_content: dict[tuple[int, int], dict[str, sp.Expr]] = {}
        for w in _words("12", k, k):
            key = (w.count("1"), w.count("2"))
            by_content.setdefault(key, {})[w] = _eval_word(w, mats, x.a).trace()
        for key, traces in by_content.items():
            vals = set(traces.values())
            if len(vals) > 1:
                bad.append({"content": key, "traces": {w: str(v) for w, v in traces.items()}})
    return bad


def load_datum(path: str) -> ADHMDatum:
    with open(path) as fh:
        return ADHMDatum.from_json(json.load(fh))
