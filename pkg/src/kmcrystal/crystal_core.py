"""Abstract crystals in the positive-weight convention, with the tensor rule.

Sign convention: weights of ``B(infinity)`` are positive, ``f_i`` moves toward
the weight-zero element and ``phi_i(b) = max{n : f_i^n(b) != None}``.  The
``epsilon`` functions are then forced: ``eps_i = phi_i - <wt, alphacheck_i>``.
Relative to the usual Kashiwara convention this exchanges ``e <-> f`` and
``eps <-> phi`` and negates weights.

``None`` plays the role of the zero object of a crystal, and ``NEG_INF``
(a float ``-inf``) is the value of ``eps``/``phi`` for directions that act
trivially; it absorbs under ``+`` and ``max``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Sequence

from .root_datum import RootDatum, RootDatumError

NEG_INF = -math.inf


class Crystal:
    """Interface every crystal view implements.

    Elements are arbitrary hashables; ``e``/``f`` return ``None`` for zero.
    """

    datum: RootDatum

    @property
    def index_set(self) -> tuple[int, ...]:
        return self.datum.labels

    def weight(self, b) -> tuple:
        raise NotImplementedError

    def e(self, i: int, b):
        raise NotImplementedError

    def f(self, i: int, b):
        raise NotImplementedError

    def phi(self, i: int, b):
        raise NotImplementedError

    def eps(self, i: int, b):
        p = self.phi(i, b)
        if p == NEG_INF:
            return NEG_INF
        return p - self.datum.pair(self.weight(b), i)


class ElementaryCrystal(Crystal):
    """``B_i``: elements ``n >= 0`` standing for ``b_i(n)``, of weight ``n alpha_i``."""

    def __init__(self, datum: RootDatum, i: int):
        self.datum = datum
        self.i = i
        self._alpha = datum.simple(i)

    def weight(self, n: int) -> tuple:
        return tuple(n * x for x in self._alpha)

    def e(self, j, n):
        return n + 1 if j == self.i else None

    def f(self, j, n):
        if j != self.i or n == 0:
            return None
        return n - 1

    def phi(self, j, n):
        return n if j == self.i else NEG_INF

    def eps(self, j, n):
        return -n if j == self.i else NEG_INF


def elementary_ops(datum: RootDatum, i: int, n: int) -> dict[str, Any]:
    """All structure values at ``b_i(n)``."""
    if n < 0:
        raise ValueError("b_i(n) needs n >= 0")
    b = ElementaryCrystal(datum, i)
    return {"e": b.e(i, n), "f": b.f(i, n), "eps": b.eps(i, n), "phi": b.phi(i, n), "wt": b.weight(n)}


class Sl2StringCrystal(Crystal):
    """Finite string of highest weight ``n`` in direction ``i``.

    Element ``k`` (``0 <= k <= n``) has weight ``top - k alpha_i``; ``f_i`` raises
    the depth ``k``.  ``top`` must satisfy ``<top, alphacheck_i> = n``; the default
    is ``n/2 alpha_i`` in rational coordinates.
    """

    def __init__(self, datum: RootDatum, i: int, n: int, top: Sequence | None = None):
        self.datum = datum
        self.i = i
        self.n = n
        alpha = datum.simple(i)
        if top is None:
            top = tuple(Fraction(n * x, 2) for x in alpha)
        if datum.pair(top, i) != n:
            raise ValueError("top weight must pair to n with alphacheck_i")
        self.top = tuple(top)
        self._alpha = alpha

    def elements(self) -> list[int]:
        return list(range(self.n + 1))

    def weight(self, k):
        return tuple(t - k * a for t, a in zip(self.top, self._alpha))

    def e(self, j, k):
        return k - 1 if j == self.i and k > 0 else None

    def f(self, j, k):
        return k + 1 if j == self.i and k < self.n else None

    def phi(self, j, k):
        return self.n - k if j == self.i else NEG_INF

    def eps(self, j, k):
        return k if j == self.i else NEG_INF


class LeviRestriction(Crystal):
    """Keep directions in ``m``; the others kill everything with ``eps = phi = -inf``."""

    def __init__(self, base: Crystal, m: Iterable[int]):
        self.base = base
        self.datum = base.datum
        self.m = frozenset(m)

    def weight(self, b):
        return self.base.weight(b)

    def e(self, i, b):
        return self.base.e(i, b) if i in self.m else None

    def f(self, i, b):
        return self.base.f(i, b) if i in self.m else None

    def phi(self, i, b):
        return self.base.phi(i, b) if i in self.m else NEG_INF

    def eps(self, i, b):
        return self.base.eps(i, b) if i in self.m else NEG_INF


class TensorCrystal(Crystal):
    """``B1 (x) B2`` on pairs ``(x, y)``.

    In the positive-weight convention the rule compatible with the embedding
    ``b -> b' (x) b_i(n)`` is

    * ``phi_i(x(x)y) = max(phi_i(x), phi_i(y) + <wt x, alphacheck_i>)``
    * ``eps_i(x(x)y) = max(eps_i(y), eps_i(x) - <wt y, alphacheck_i>)``
    * ``f_i`` acts on ``x`` iff ``eps_i(x) >= phi_i(y)``, else on ``y``
    * ``e_i`` acts on ``x`` iff ``eps_i(x) > phi_i(y)``, else on ``y``
    """

    def __init__(self, left: Crystal, right: Crystal):
        if left.datum != right.datum:
            raise RootDatumError("tensor factors must share a root datum")
        self.left = left
        self.right = right
        self.datum = left.datum

    def weight(self, b):
        x, y = b
        return tuple(u + v for u, v in zip(self.left.weight(x), self.right.weight(y)))

    def phi(self, i, b):
        x, y = b
        return max(self.left.phi(i, x), self.right.phi(i, y) + self.datum.pair(self.left.weight(x), i))

    def eps(self, i, b):
        x, y = b
        return max(self.right.eps(i, y), self.left.eps(i, x) - self.datum.pair(self.right.weight(y), i))

    def _acts_left(self, i, b, strict: bool) -> bool:
        x, y = b
        ex, py = self.left.eps(i, x), self.right.phi(i, y)
        return ex > py if strict else ex >= py

    def f(self, i, b):
        x, y = b
        if self._acts_left(i, b, strict=False):
            fx = self.left.f(i, x)
            return None if fx is None else (fx, y)
        fy = self.right.f(i, y)
        return None if fy is None else (x, fy)

    def e(self, i, b):
        x, y = b
        if self._acts_left(i, b, strict=True):
            ex = self.left.e(i, x)
            return None if ex is None else (ex, y)
        ey = self.right.e(i, y)
        return None if ey is None else (x, ey)


def tensor(left: Crystal, right: Crystal) -> TensorCrystal:
    return TensorCrystal(left, right)


@dataclass
class Report:
    """Outcome of an invariant check; ``violations`` hold located failures."""

    name: str
    checked: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, **info) -> None:
        self.violations.append(info)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checked": self.checked, "violations": self.violations[:50]}

    def __str__(self) -> str:
        status = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        return f"{self.name}: {status} ({self.checked} checked)"


def check_normality(view: Crystal, sample: Iterable[Hashable], *, f_steps_cap: int = 10_000) -> Report:
    """Check phi-normality, the eps rule and the e/f partial inverse on ``sample``."""
    rep = Report("normality")
    datum = view.datum
    for b in sample:
        rep.checked += 1
        wt = view.weight(b)
        for i in view.index_set:
            p = view.phi(i, b)
            if p != NEG_INF:
                n, cur = 0, view.f(i, b)
                while cur is not None and n < f_steps_cap:
                    n += 1
                    cur = view.f(i, cur)
                if n != p:
                    rep.add(element=b, i=i, kind="phi-normality", phi=p, f_steps=n)
                if view.eps(i, b) != p - datum.pair(wt, i):
                    rep.add(element=b, i=i, kind="eps-rule", eps=view.eps(i, b), phi=p)
            elif view.f(i, b) is not None or view.e(i, b) is not None:
                rep.add(element=b, i=i, kind="trivial direction moves")
            fb = view.f(i, b)
            if fb is not None and view.e(i, fb) != b:
                rep.add(element=b, i=i, kind="e(f(b)) != b")
            eb = view.e(i, b)
            if eb is not None and view.f(i, eb) != b:
                rep.add(element=b, i=i, kind="f(e(b)) != b")
    return rep


class TableCrystal(Crystal):
    """A crystal given by explicit tables, mainly for negative controls."""

    def __init__(self, datum: RootDatum, weights: dict, e: dict, f: dict, phi: dict):
        self.datum = datum
        self._wt, self._e, self._f, self._phi = weights, e, f, phi

    def weight(self, b):
        return self._wt[b]

    def e(self, i, b):
        return self._e.get((i, b))

    def f(self, i, b):
        return self._f.get((i, b))

    def phi(self, i, b):
        return self._phi.get((i, b), NEG_INF)
