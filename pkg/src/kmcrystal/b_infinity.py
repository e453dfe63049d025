"""A computable model of B(infinity) by string coordinates along a word.

An element is a finite-support tuple ``a = (a_1, a_2, ...)`` of non-negative
integers attached to an infinite word ``iota = (i_1, i_2, ...)``; trailing zeros
are trimmed so equal elements compare equal.  The operators come from the
signature rule on the semi-infinite tensor product of elementary crystals:

    sigma_k(a) = a_k + sum_{j > k} <alpha_{i_j}, alphacheck_i> a_j      (i_k = i)

``up_i(a) = max(0, max_k sigma_k)``.  Raising (``e_i`` in the positive-weight
convention) adds 1 at the smallest maximizing position, lowering (``f_i``)
subtracts 1 at the largest one when ``up_i > 0``.  ``phi_i = up_i``.

Star operations are obtained by re-expressing an element along the word with
``i`` prepended: the first coordinate there is the star depth.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .crystal_core import NEG_INF, Crystal, ElementaryCrystal, Report, TensorCrystal, check_normality
from .root_datum import RootDatum, RootDatumError, from_json as datum_from_json, weight_from_json

Elt = tuple[int, ...]
FORMAT_VERSION = 1


class CorruptRecord(ValueError):
    """A graph-file record that cannot be trusted; ``element`` is its id."""

    def __init__(self, element: int, reason: str):
        super().__init__(f"element {element}: {reason}")
        self.element = element
        self.reason = reason


class ModelInvariantError(RuntimeError):
    """The combinatorial model produced something the theory forbids."""


@dataclass(frozen=True)
class Word:
    """Infinite word: an optional finite prefix followed by a repeated period."""

    period: tuple[int, ...]
    prefix: tuple[int, ...] = ()

    def letter(self, k: int) -> int:
        if k < len(self.prefix):
            return self.prefix[k]
        return self.period[(k - len(self.prefix)) % len(self.period)]

    def next_position(self, i: int, start: int) -> int:
        """Smallest position ``>= start`` carrying letter ``i``."""
        k = start
        while self.letter(k) != i:
            k += 1
        return k

    def prepend(self, i: int) -> "Word":
        return Word(self.period, (i,) + self.prefix)


def _trim(a: Sequence[int]) -> Elt:
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return tuple(a[:n])


class BInfinity(Crystal):
    """String model of B(infinity) for ``datum`` along ``word``."""

    def __init__(self, datum: RootDatum, word: Word | Sequence[int] | None = None):
        self.datum = datum
        if word is None:
            word = Word(datum.labels)
        elif not isinstance(word, Word):
            word = Word(tuple(word))
        missing = set(datum.labels) - set(word.period)
        if missing or not set(word.period) <= set(datum.labels) or not set(word.prefix) <= set(datum.labels):
            raise RootDatumError(f"word period {word.period} must use every index of {datum.labels} and no other")
        self.word = word
        # <alpha_j, alphacheck_i> as a table keyed by labels
        self._c = {i: {j: datum.cartan[datum.pos[j]][datum.pos[i]] for j in datum.labels} for i in datum.labels}
        self._star_models: dict[int, BInfinity] = {}
        self._restring_cache: dict = {}

    zero: Elt = ()

    # -- signature rule ---------------------------------------------------------
    def signature(self, a: Elt, i: int) -> tuple[int, int, int | None]:
        """Return ``(up_i, raise position, lower position or None)``."""
        c = self._c[i]
        w = self.word
        tail = 0
        best = None
        lo = hi = None
        for k in range(len(a) - 1, -1, -1):
            lk = w.letter(k)
            if lk == i:
                s = a[k] + tail
                if best is None or s > best:
                    best, lo, hi = s, k, k
                elif s == best:
                    lo = k
            tail += c[lk] * a[k]
        beyond = w.next_position(i, len(a))
        if best is None or best < 0:
            best, lo, hi = 0, beyond, beyond
        elif best == 0:
            pass  # beyond-support positions also attain 0, but lo is already smaller
        up = best
        return up, lo, (hi if up > 0 else None)

    def phi(self, i: int, a: Elt) -> int:
        return self.signature(a, i)[0]

    def weight(self, a: Elt) -> tuple[int, ...]:
        wt = [0] * self.datum.n
        for k, x in enumerate(a):
            wt[self.datum.pos[self.word.letter(k)]] += x
        return tuple(wt)

    def height(self, a: Elt) -> int:
        return sum(a)

    def e(self, i: int, a: Elt) -> Elt:
        _, k, _ = self.signature(a, i)
        b = list(a) + [0] * (k + 1 - len(a))
        b[k] += 1
        return _trim(b)

    def f(self, i: int, a: Elt) -> Elt | None:
        _, _, k = self.signature(a, i)
        if k is None:
            return None
        b = list(a)
        b[k] -= 1
        return _trim(b)

    def is_valid_sequence(self, a: Sequence[int]) -> bool:
        """Whether ``a`` is a string of some element (reachable from zero)."""
        if not all(isinstance(x, int) and x >= 0 for x in a):
            return False
        a = _trim(a)
        try:
            return self.from_path(reversed(self.lowering_path(a))) == a
        except ModelInvariantError:
            return False

    # -- restringing and star operations ---------------------------------------
    def lowering_path(self, a: Elt) -> list[int]:
        """Greedy ``f`` moves from ``a`` down to the zero sequence (first move first)."""
        path = []
        cur = a
        limit = self.height(a)
        while cur:
            if len(path) > limit:
                raise ModelInvariantError(f"no path to zero from {a}")
            for i in self.datum.labels:
                nxt = self.f(i, cur)
                if nxt is not None:
                    path.append(i)
                    cur = nxt
                    break
            else:
                raise ModelInvariantError(f"{cur} is killed by every f_i but is not zero")
        return path

    def from_path(self, path: Iterable[int]) -> Elt:
        """Apply ``e`` moves to the zero sequence, in order."""
        cur: Elt = ()
        for i in path:
            cur = self.e(i, cur)
        return cur

    def restring(self, a: Elt, target: "BInfinity") -> Elt:
        key = (a, target.word)
        hit = self._restring_cache.get(key)
        if hit is None:
            hit = target.from_path(reversed(self.lowering_path(a)))
            self._restring_cache[key] = hit
        return hit

    def star_model(self, i: int) -> "BInfinity":
        m = self._star_models.get(i)
        if m is None:
            m = BInfinity(self.datum, self.word.prepend(i))
            self._star_models[i] = m
        return m

    def phi_star(self, i: int, a: Elt) -> int:
        c = self.restring(a, self.star_model(i))
        return c[0] if c else 0

    def eps_star(self, i: int, a: Elt) -> int:
        return self.phi_star(i, a) - self.datum.pair(self.weight(a), i)

    def f_star(self, i: int, a: Elt) -> Elt | None:
        m = self.star_model(i)
        c = self.restring(a, m)
        if not c or c[0] == 0:
            return None
        return m.restring(_trim((c[0] - 1,) + c[1:]), self)

    def e_star(self, i: int, a: Elt) -> Elt:
        m = self.star_model(i)
        c = self.restring(a, m)
        head = c[0] if c else 0
        return m.restring(_trim((head + 1,) + tuple(c[1:])), self)

    def star_ops(self, i: int, a: Elt) -> tuple[Elt, Elt | None, int]:
        """``(e*_i(a), f*_i(a), star depth)``."""
        return self.e_star(i, a), self.f_star(i, a), self.phi_star(i, a)

    def psi(self, i: int, a: Elt) -> tuple[Elt, int]:
        """``a = (e*_i)^n (a')`` with ``f*_i(a') = None``; returns ``(a', n)``."""
        m = self.star_model(i)
        c = self.restring(a, m)
        if not c:
            return (), 0
        return m.restring(_trim((0,) + tuple(c[1:])), self), c[0]

    def star_view(self) -> "StarView":
        return StarView(self)


class StarView(Crystal):
    """The star crystal structure of a ``BInfinity`` model as a crystal view."""

    def __init__(self, model: BInfinity):
        self.model = model
        self.datum = model.datum

    def weight(self, a):
        return self.model.weight(a)

    def e(self, i, a):
        return self.model.e_star(i, a)

    def f(self, i, a):
        return self.model.f_star(i, a)

    def phi(self, i, a):
        return self.model.phi_star(i, a)


def signature_ops(datum: RootDatum, word: Sequence[int], a: Sequence[int], i: int):
    """``(e_i(a), f_i(a), phi_i(a))`` for a sequence along the periodic ``word``."""
    model = BInfinity(datum, word)
    a = _trim(tuple(a))
    return model.e(i, a), model.f(i, a), model.phi(i, a)


def restring(datum: RootDatum, a: Sequence[int], word: Sequence[int], new_word: Sequence[int]) -> Elt:
    return BInfinity(datum, word).restring(_trim(tuple(a)), BInfinity(datum, new_word))


# -- enumerated graph -----------------------------------------------------------------


@dataclass
class CrystalGraph:
    """All elements of height ``<= max_height`` with cached structure tables.

    ``e``/``e_star`` entries are ``None`` only at the top height, where the result
    leaves the truncation (raising never gives zero in B(infinity)).
    """

    datum: RootDatum
    word: Word
    max_height: int
    strings: list[Elt]
    weights: list[tuple[int, ...]] = field(default_factory=list)
    phi: dict[int, list[int]] = field(default_factory=dict)
    phi_star: dict[int, list[int]] = field(default_factory=dict)
    f: dict[int, list[int | None]] = field(default_factory=dict)
    f_star: dict[int, list[int | None]] = field(default_factory=dict)
    e: dict[int, list[int | None]] = field(default_factory=dict)
    e_star: dict[int, list[int | None]] = field(default_factory=dict)
    _model: BInfinity | None = None

    def __len__(self) -> int:
        return len(self.strings)

    @property
    def model(self) -> BInfinity:
        if self._model is None:
            self._model = BInfinity(self.datum, self.word)
        return self._model

    @property
    def labels(self):
        return self.datum.labels

    @property
    def index(self) -> dict[Elt, int]:
        idx = getattr(self, "_index", None)
        if idx is None:
            idx = {s: k for k, s in enumerate(self.strings)}
            self._index = idx
        return idx

    def height(self, k: int) -> int:
        return sum(self.weights[k])

    def eps(self, i: int, k: int) -> int:
        return self.phi[i][k] - self.datum.pair(self.weights[k], i)

    def eps_star(self, i: int, k: int) -> int:
        return self.phi_star[i][k] - self.datum.pair(self.weights[k], i)

    def weight_counts(self) -> dict[tuple[int, ...], int]:
        out: dict[tuple[int, ...], int] = defaultdict(int)
        for w in self.weights:
            out[w] += 1
        return dict(out)

    def view(self, star: bool = False) -> "GraphView":
        return GraphView(self, star)

    # -- persistence ------------------------------------------------------------
    def header(self) -> dict:
        return {
            "format": "kmcrystal.graph",
            "version": FORMAT_VERSION,
            "datum": self.datum.to_json(),
            "fingerprint": self.datum.fingerprint(),
            "word": list(self.word.period),
            "max_height": self.max_height,
            "count": len(self),
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header(), sort_keys=True)]
        for k, s in enumerate(self.strings):
            rec = {
                "id": k,
                "string": list(s),
                "wt": self.datum.to_weight(self.weights[k]).to_json(),
                "phi": {str(i): self.phi[i][k] for i in self.labels},
                "phiStar": {str(i): self.phi_star[i][k] for i in self.labels},
                "f": {str(i): self.f[i][k] for i in self.labels},
                "fStar": {str(i): self.f_star[i][k] for i in self.labels},
            }
            lines.append(json.dumps(rec, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "CrystalGraph":
        """Parse a graph file; body problems raise ``CorruptRecord`` naming the element."""
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise ValueError("empty graph file")
        try:
            head = json.loads(lines[0])
        except json.JSONDecodeError:
            raise ValueError("unreadable graph header") from None
        if head.get("format") != "kmcrystal.graph" or head.get("version") != FORMAT_VERSION:
            raise ValueError("unrecognized graph header")
        datum = datum_from_json(head["datum"])
        if datum.fingerprint() != head["fingerprint"]:
            raise ValueError("root-datum fingerprint mismatch in graph header")
        labels = datum.labels
        g = cls(datum, Word(tuple(head["word"])), head["max_height"], [])
        body = lines[1:]
        if len(body) != head["count"]:
            raise CorruptRecord(min(len(body), head["count"]), "element count does not match header")
        for i in labels:
            g.phi[i], g.phi_star[i], g.f[i], g.f_star[i] = [], [], [], []

        def ref(k, x):
            if x is not None and not (isinstance(x, int) and 0 <= x < len(body)):
                raise CorruptRecord(k, f"reference {x!r} out of range")
            return x

        for k, line in enumerate(body):
            try:
                rec = json.loads(line)
                if rec["id"] != k:
                    raise CorruptRecord(k, f"id {rec['id']!r} out of order")
                g.strings.append(tuple(int(x) for x in rec["string"]))
                g.weights.append(datum.from_weight(weight_from_json(datum, rec["wt"])))
                for i in labels:
                    key = str(i)
                    g.phi[i].append(int(rec["phi"][key]))
                    g.phi_star[i].append(int(rec["phiStar"][key]))
                    g.f[i].append(ref(k, rec["f"][key]))
                    g.f_star[i].append(ref(k, rec["fStar"][key]))
            except CorruptRecord:
                raise
            except (ValueError, KeyError, TypeError, RootDatumError) as exc:
                raise CorruptRecord(k, f"unreadable record: {exc}") from None
        g._invert_lowering()
        return g

    def _invert_lowering(self) -> None:
        for i in self.labels:
            self.e[i] = [None] * len(self)
            self.e_star[i] = [None] * len(self)
            for k in range(len(self)):
                t = self.f[i][k]
                if t is not None:
                    self.e[i][t] = k
                t = self.f_star[i][k]
                if t is not None:
                    self.e_star[i][t] = k


class GraphView(Crystal):
    """Crystal view on element ids of an enumerated graph (ordinary or star)."""

    def __init__(self, graph: CrystalGraph, star: bool = False):
        self.graph = graph
        self.datum = graph.datum
        self.star = star

    def weight(self, k):
        return self.graph.weights[k]

    def e(self, i, k):
        return (self.graph.e_star if self.star else self.graph.e)[i][k]

    def f(self, i, k):
        return (self.graph.f_star if self.star else self.graph.f)[i][k]

    def phi(self, i, k):
        return (self.graph.phi_star if self.star else self.graph.phi)[i][k]


def enumerate_graph(datum: RootDatum, max_height: int, word: Sequence[int] | Word | None = None) -> CrystalGraph:
    """Breadth-first closure of the zero sequence under raising, up to ``max_height``."""
    if max_height < 0:
        raise ValueError("max_height must be non-negative")
    model = BInfinity(datum, word)
    layer = {()}
    found = [()]
    for _ in range(max_height):
        nxt = set()
        for a in layer:
            for i in datum.labels:
                nxt.add(model.e(i, a))
        layer = nxt
        found.extend(nxt)
    strings = sorted(found, key=lambda s: (sum(s), s))
    g = CrystalGraph(datum, model.word, max_height, strings, _model=model)
    idx = g.index
    g.weights = [model.weight(s) for s in strings]
    for i in datum.labels:
        g.phi[i], g.phi_star[i], g.f[i], g.f_star[i] = [], [], [], []
        for s in strings:
            g.phi[i].append(model.phi(i, s))
            fs = model.f(i, s)
            g.f[i].append(None if fs is None else idx[fs])
            g.phi_star[i].append(model.phi_star(i, s))
            fs = model.f_star(i, s)
            g.f_star[i].append(None if fs is None else idx[fs])
    g._invert_lowering()
    return g


# -- invariant suites on an enumerated graph ---------------------------------------------


def check_kpf(graph: CrystalGraph) -> Report:
    rep = Report("kpf-identity")
    counts = graph.weight_counts()
    d = graph.datum
    # every positive weight up to the bound, including those absent from the graph
    from .root_datum import partition_count

    roots = d.positive_roots(graph.max_height)
    for lam in _positive_weights(d.n, graph.max_height):
        rep.checked += 1
        expected = partition_count(roots, lam)
        got = counts.get(lam, 0)
        if got != expected:
            rep.add(weight=list(d.to_weight(lam).coords), graph=got, kostant=expected)
    return rep


def _positive_weights(n: int, bound: int):
    def rec(prefix, left):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for x in range(left + 1):
            yield from rec(prefix + [x], left - x)

    yield from rec([], bound)


def check_axioms(graph: CrystalGraph) -> Report:
    """phi-normality of both structures, the eps rule, and e/f partial inverses."""
    rep = Report("crystal-axioms")
    for star in (False, True):
        sub = check_normality(graph.view(star), range(len(graph)))
        rep.checked += sub.checked
        for v in sub.violations:
            rep.add(structure="star" if star else "ordinary", **v)
    # top-height raising must be the only missing entries
    for i in graph.labels:
        for k in range(len(graph)):
            if graph.height(k) < graph.max_height:
                if graph.e[i][k] is None:
                    rep.add(element=k, i=i, kind="e missing below the truncation")
                if graph.e_star[i][k] is None:
                    rep.add(element=k, i=i, kind="e* missing below the truncation")
    return rep


def check_commutation(graph: CrystalGraph) -> Report:
    """Ordinary operators in direction i commute with star operators in direction j != i."""
    rep = Report("commutation")
    H = graph.max_height

    def compose(first, second, k):
        x = first(k)
        return None if x is None else second(x)

    for k in range(len(graph)):
        h = graph.height(k)
        for i in graph.labels:
            for j in graph.labels:
                if i == j:
                    continue
                e, f = graph.e[i], graph.f[i]
                es, fs = graph.e_star[j], graph.f_star[j]
                pairs = [("f", "f*", f, fs)]
                if h < H:
                    pairs += [("e", "f*", e, fs), ("f", "e*", f, es)]
                if h + 2 <= H:
                    pairs.append(("e", "e*", e, es))
                for n1, n2, op, sop in pairs:
                    rep.checked += 1
                    a = compose(op.__getitem__, sop.__getitem__, k)
                    b = compose(sop.__getitem__, op.__getitem__, k)
                    if a != b:
                        rep.add(element=k, i=i, j=j, ops=f"{n1}_{i} vs {n2}_{j}", first=a, second=b)
    return rep


def check_psi(graph: CrystalGraph) -> Report:
    """Psi_i is a crystal morphism into graph (x) B_i and a bijection onto its image."""
    rep = Report("psi-morphism")
    d = graph.datum
    H = graph.max_height
    view = graph.view()
    for i in graph.labels:
        target = TensorCrystal(view, ElementaryCrystal(d, i))

        def psi(k, i=i):
            n = graph.phi_star[i][k]
            cur = k
            for _ in range(n):
                cur = graph.f_star[i][cur]
            return cur, n

        images = {}
        for k in range(len(graph)):
            img = psi(k)
            if graph.f_star[i][img[0]] is not None:
                rep.add(element=k, i=i, kind="peeled element not killed by f*")
            if img in images:
                rep.add(element=k, i=i, kind="not injective", other=images[img])
            images[img] = k
            if graph.height(k) > H - 1:
                continue
            rep.checked += 1
            for j in graph.labels:
                if target.phi(j, img) != graph.phi[j][k] or target.eps(j, img) != graph.eps(j, k):
                    rep.add(element=k, i=i, j=j, kind="phi/eps mismatch")
                for name, ops in (("f", graph.f), ("e", graph.e)):
                    moved = ops[j][k]
                    lhs = None if moved is None else psi(moved)
                    rhs = getattr(target, name)(j, img)
                    if lhs != rhs:
                        rep.add(element=k, i=i, j=j, kind=f"{name} not intertwined", psi_side=lhs, tensor_side=rhs)
        expected = {
            (k, n)
            for k in range(len(graph))
            if graph.f_star[i][k] is None
            for n in range(H - graph.height(k) + 1)
        }
        if set(images) != expected:
            rep.add(i=i, kind="image mismatch", missing=len(expected - set(images)), extra=len(set(images) - expected))
    return rep


def highest_weight_report(graph: CrystalGraph) -> Report:
    rep = Report("highest-weight")
    for k in range(len(graph)):
        if not graph.strings[k]:
            continue
        rep.checked += 1
        if all(graph.f[i][k] is None for i in graph.labels):
            rep.add(element=k, kind="killed by every f_i")
        if all(graph.f_star[i][k] is None for i in graph.labels):
            rep.add(element=k, kind="killed by every f*_i")
    return rep


def check_restring(graph: CrystalGraph, other_word: Sequence[int]) -> Report:
    """Restringing to another word commutes with every e_i/f_i and round-trips."""
    rep = Report("restring-isomorphism")
    model = graph.model
    other = BInfinity(graph.datum, other_word)
    for k, s in enumerate(graph.strings):
        rep.checked += 1
        t = model.restring(s, other)
        if other.restring(t, model) != s:
            rep.add(element=k, kind="round trip failed")
        for i in graph.labels:
            fs = model.f(i, s)
            ft = other.f(i, t)
            if (None if fs is None else model.restring(fs, other)) != ft:
                rep.add(element=k, i=i, kind="f not preserved")
            if graph.height(k) < graph.max_height and model.restring(model.e(i, s), other) != other.e(i, t):
                rep.add(element=k, i=i, kind="e not preserved")
            if other.phi(i, t) != graph.phi[i][k]:
                rep.add(element=k, i=i, kind="phi not preserved")
    return rep


def check_table_consistency(graph: CrystalGraph) -> Report:
    """Every stored row agrees with the string model (guards cached files)."""
    rep = Report("table-consistency")
    model = graph.model
    idx = graph.index
    if len(idx) != len(graph):
        rep.add(kind="duplicate strings")
    for k, s in enumerate(graph.strings):
        rep.checked += 1
        if not model.is_valid_sequence(s) or model.height(s) > graph.max_height:
            rep.add(element=k, kind="string outside the model")
            continue
        if model.weight(s) != graph.weights[k]:
            rep.add(element=k, kind="weight mismatch")
        for i in graph.labels:
            if model.phi(i, s) != graph.phi[i][k] or model.phi_star(i, s) != graph.phi_star[i][k]:
                rep.add(element=k, i=i, kind="phi mismatch")
            for name, op, table in (("f", model.f, graph.f), ("f*", model.f_star, graph.f_star)):
                t = op(i, s)
                if (None if t is None else idx.get(t)) != table[i][k]:
                    rep.add(element=k, i=i, kind=f"{name} mismatch")
    return rep

