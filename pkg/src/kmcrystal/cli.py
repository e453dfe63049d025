"""Command line: enumerate, verify, parabolic, stalk, dims, adhm.

Exit codes: 0 all checks pass, 1 a mathematical invariant failed, 2 bad input
or environment.  Tables go to stdout as TSV (or JSON with ``--format json``);
``--out`` always receives the JSON contract (the JSON-lines graph for
``enumerate``).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import adhm as adhm_mod
from . import ic_stalks as ic
from .b_infinity import (
    CorruptRecord,
    CrystalGraph,
    ModelInvariantError,
    check_axioms,
    check_commutation,
    check_kpf,
    check_psi,
    check_table_consistency,
    enumerate_graph,
    highest_weight_report,
)
from .parabolic import LeviSpec, check_parabolic, parabolic_table
from .root_datum import RootDatum, RootDatumError, affinize, build_finite, from_json

log = logging.getLogger("kmcrystal")


class InputError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


# -- configuration -------------------------------------------------------------


def load_datum(args) -> RootDatum:
    if args.cartan:
        try:
            with open(args.cartan) as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read Cartan file {args.cartan}: {exc}") from None
        if isinstance(spec, list):
            spec = {"cartan": spec}
        d = from_json(spec)
        if args.affine and not d.affine:
            d = affinize(d)
        return d
    if not args.family or args.rank is None:
        raise InputError("give --cartan FILE or --family X --rank N")
    d = build_finite(args.family, args.rank)
    return affinize(d) if args.affine else d


def parse_labels(text: str | None, d: RootDatum, what: str) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        out = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise InputError(f"{what} must be comma-separated integers") from None
    bad = [x for x in out if x not in d.labels]
    if bad:
        raise InputError(f"{what} uses labels {bad} outside {list(d.labels)}")
    return out


def _cache_path(cache: str, d: RootDatum, word, H: int) -> Path:
    key = json.dumps([d.fingerprint(), list(word), H])
    return Path(cache) / f"graph-{hashlib.sha256(key.encode()).hexdigest()[:16]}.jsonl"


def obtain_graph(args, d: RootDatum, strict: bool = False) -> tuple[CrystalGraph, bool]:
    """Graph from the cache when the header matches, else freshly enumerated.

    With ``strict`` a corrupt body record propagates (``verify`` reports it);
    otherwise it forces recomputation.
    """
    word = parse_labels(args.word, d, "--word")
    if args.max_height < 0:
        raise InputError("--max-height must be non-negative")
    if args.cache:
        path = _cache_path(args.cache, d, word or d.labels, args.max_height)
        if path.exists():
            text = path.read_text()
            try:
                head = json.loads(text.split("\n", 1)[0])
            except json.JSONDecodeError:
                head = {}
            if (
                head.get("fingerprint") == d.fingerprint()
                and head.get("max_height") == args.max_height
                and tuple(head.get("word", ())) == tuple(word or d.labels)
            ):
                try:
                    cached = CrystalGraph.from_jsonl(text)
                    if strict or check_table_consistency(cached).ok:
                        return cached, True
                    log.warning("cache %s disagrees with the model; recomputing", path)
                except CorruptRecord:
                    if strict:
                        raise
                    log.warning("cache %s is corrupt; recomputing", path)
            else:
                log.info("cache header mismatch; recomputing")
        graph = enumerate_graph(d, args.max_height, word)
        write_atomic(path, graph.to_jsonl())
        return graph, False
    return enumerate_graph(d, args.max_height, word), False


def emit(args, rows: list[dict], columns: list[str], payload: dict) -> None:
    payload = _jsonable(payload)
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\t".join(columns))
        for r in rows:
            print("\t".join(_cell(r.get(c)) for c in columns))
    if args.out:
        write_atomic(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(_cell(x) for x in v) + ")"
    return str(v)


# -- verbs ---------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    d = load_datum(args)
    g, _ = obtain_graph(args, d)
    if args.out:
        write_atomic(args.out, g.to_jsonl())
    counts = g.weight_counts()
    rows = [
        {"weight": list(d.to_weight(w).coords), "height": sum(w), "count": c}
        for w, c in sorted(counts.items(), key=lambda kv: (sum(kv[0]), kv[0]))
    ]
    summary = {"datum": d.name, "max_height": g.max_height, "elements": len(g), "weights": rows}
    if args.format == "json":
        print(json.dumps(_jsonable(summary), indent=2, sort_keys=True))
    else:
        print(f"# {d.name}\tmax_height={g.max_height}\telements={len(g)}")
        print("weight\theight\tcount")
        for r in rows:
            print(f"{_cell(r['weight'])}\t{r['height']}\t{r['count']}")
    return 0


def _levis(d: RootDatum, args) -> list[tuple[int, ...]]:
    chosen = parse_labels(args.levi, d, "--levi")
    if chosen is not None:
        return [chosen]
    return [(i,) for i in d.labels]


def cmd_verify(args) -> int:
    d = load_datum(args)
    reports = []
    try:
        g, cached = obtain_graph(args, d, strict=True)
    except CorruptRecord as exc:
        rep = {"name": "table-consistency", "ok": False, "checked": 0,
               "violations": [{"element": exc.element, "kind": exc.reason}]}
        return _finish_verify(args, d, [rep])
    if cached:
        consistency = check_table_consistency(g)
        if not consistency.ok:
            return _finish_verify(args, d, [consistency.to_json()])
        reports.append(consistency)
    started = time.perf_counter()
    reports += [check_kpf(g), check_axioms(g), check_commutation(g), check_psi(g), highest_weight_report(g)]
    try:
        for m in _levis(d, args):
            reports.append(check_parabolic(g, m))
    except ModelInvariantError as exc:
        reports.append({"name": "parabolic", "ok": False, "checked": 0, "violations": [{"kind": str(exc)}]})
    log.info("suites ran in %.2fs", time.perf_counter() - started)
    return _finish_verify(args, d, [r if isinstance(r, dict) else r.to_json() for r in reports])


def _finish_verify(args, d: RootDatum, reports: list[dict]) -> int:
    ok = all(r["ok"] for r in reports)
    payload = {"datum": d.name, "max_height": args.max_height, "ok": ok, "suites": reports}
    rows = [{"suite": r["name"], "status": "pass" if r["ok"] else "FAIL", "checked": r["checked"],
             "violations": len(r["violations"]),
             "first": json.dumps(r["violations"][0], sort_keys=True) if r["violations"] else None}
            for r in reports]
    emit(args, rows, ["suite", "status", "checked", "violations", "first"], payload)
    return 0 if ok else 1


def cmd_parabolic(args) -> int:
    d = load_datum(args)
    g, _ = obtain_graph(args, d)
    out = []
    status = 0
    for m in _levis(d, args):
        try:
            LeviSpec.make(d, m)
        except RootDatumError as exc:
            raise InputError(str(exc)) from None
        rep = check_parabolic(g, m)
        status |= 0 if rep.ok else 1
        for row in parabolic_table(g, m):
            out.append(row.to_json(d))
    emit(args, out, ["m", "nu", "mult_graph", "mult_char", "mult_cnu", "status"],
         {"datum": d.name, "max_height": g.max_height, "rows": out})
    return status


def _finite_for_stalks(d: RootDatum) -> RootDatum:
    return d.finite if d.affine else d


def cmd_stalk(args) -> int:
    d = _finite_for_stalks(load_datum(args))
    if not d.simply_laced:
        raise InputError(ic.DUAL_TWIST)
    try:
        part = ic.Partition.parse(args.partition or "1:1")
    except ValueError as exc:
        raise InputError(str(exc)) from None
    raw = ic.stalk_polynomial(d, part)
    point = ic.normalized_point_stalk(d)
    if point != ic.exponent_polynomial(d):
        log.error("one-point stalk disagrees with the exponent formula")
        return 1
    payload = {
        "datum": d.name,
        "partition": str(part),
        "raw": [[e, c] for e, c in raw.items()],
        "raw_text": ic.format_qpoly(raw),
        "normalized_point": ic.format_qpoly(point),
        "note": "generators carry q^(2m) t^l; the point stalk is shown divided by q^2; "
        "the offset to perverse normalization is not fixed",
    }
    rows = [{"partition": str(part), "raw": ic.format_qpoly(raw), "normalized_point": ic.format_qpoly(point)}]
    emit(args, rows, ["partition", "raw", "normalized_point"], payload)
    return 0


def cmd_dims(args) -> int:
    d = load_datum(args)
    fin = d.finite if d.affine else d
    rows = []
    hcheck = d.dual_coxeter()
    rows.append({"quantity": "dual_coxeter", "value": hcheck})
    if d.affine:
        delta = sum(d.delta)
        rows.append({"quantity": "|delta|", "value": delta})
        if delta != hcheck:
            return _dims_out(args, d, rows, 1)
    for i in fin.labels:
        z = ic.zastava_dims(fin, (), fin.simple(i))
        rows.append({"quantity": f"borel_zastava(alpha_{i})", "value": z["dimension"]})
    for a in range(1, max(args.level_max, 1) + 1):
        rows.append({"quantity": f"bundle_dim(a={a})", "value": ic.bundle_dimension(fin, a)})
    theta = parse_theta(args.theta, fin)
    if theta is not None:
        levi = parse_labels(args.levi, fin, "--levi") or ()
        z = ic.zastava_dims(fin, levi, theta)
        for k, v in z.items():
            rows.append({"quantity": f"zastava.{k}", "value": v})
        rows.append({"quantity": "grassmannian_intersection(theta,0)",
                     "value": ic.grassmannian_intersection_dim(fin, theta, fin.zero())})
    return _dims_out(args, d, rows, 0)


def parse_theta(text, d):
    if text is None:
        return None
    try:
        theta = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError("--theta must be comma-separated integers") from None
    if len(theta) != d.n:
        raise InputError(f"--theta needs {d.n} coefficients")
    return theta


def _dims_out(args, d, rows, code):
    emit(args, rows, ["quantity", "value"], {"datum": d.name, "ok": code == 0, "rows": rows})
    return code


def cmd_adhm(args) -> int:
    try:
        x = adhm_mod.load_datum(args.datum)
    except OSError as exc:
        raise InputError(f"cannot read {args.datum}: {exc}") from None
    except (json.JSONDecodeError, adhm_mod.ADHMError) as exc:
        raise InputError(str(exc)) from None
    lhs, rhs, ok = adhm_mod.monad_identity_check(x)
    res = adhm_mod.moment_residual(x)
    p1, p2 = adhm_mod.charpoly_projections(x)
    inv = adhm_mod.invariants_table(x, args.word_length)
    payload = {
        "a": x.a,
        "n": x.n,
        "residual": [[str(v) for v in res.row(r)] for r in range(res.rows)],
        "moment_zero": res.is_zero_matrix,
        "stable": adhm_mod.is_stable(x),
        "costable": adhm_mod.is_costable(x),
        "charpoly_B1": str(p1.as_expr()),
        "charpoly_B2": str(p2.as_expr()),
        "monad_bd": [[str(v) for v in lhs.row(r)] for r in range(lhs.rows)],
        "monad_identity": ok,
        "invariants": dict(inv),
    }
    rows = [{"key": k, "value": payload[k]} for k in
            ("moment_zero", "stable", "costable", "charpoly_B1", "charpoly_B2", "monad_identity")]
    if not res.is_zero_matrix:
        rows.append({"key": "z0^2 coefficient of b.d", "value": payload["residual"]})
    rows += [{"key": k, "value": v} for k, v in inv]
    emit(args, rows, ["key", "value"], payload)
    return 0 if ok else 1


# -- argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kmcrystal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, graph=True):
        src = sp.add_argument_group("root datum")
        src.add_argument("--cartan", metavar="FILE", help="JSON Cartan matrix or root-datum object")
        src.add_argument("--family", help="Dynkin family letter A-G")
        src.add_argument("--rank", type=int)
        src.add_argument("--affine", action="store_true", help="untwisted affinization")
        if graph:
            sp.add_argument("--max-height", type=int, default=4)
            sp.add_argument("--word", help='word period, e.g. "1,2"')
            sp.add_argument("--cache", metavar="DIR")
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--format", choices=("tsv", "json"), default="tsv")
        sp.add_argument("-v", "--verbose", action="store_true")

    common(sub.add_parser("enumerate", help="enumerate B(infinity) up to a height"))
    v = sub.add_parser("verify", help="run the invariant suites")
    common(v)
    v.add_argument("--levi", help="Levi labels for the parabolic suite (default: each single label)")
    pa = sub.add_parser("parabolic", help="three-way multiplicity table")
    common(pa)
    pa.add_argument("--levi", help='Levi labels, e.g. "1"')
    st = sub.add_parser("stalk", help="stalk polynomials for a partition")
    common(st, graph=False)
    st.add_argument("--partition", help='parts "d:n,d:n" (default "1:1")')
    dm = sub.add_parser("dims", help="dimension formulas")
    common(dm, graph=False)
    dm.add_argument("--level-max", type=int, default=1, help="bundle degrees a = 1..L")
    dm.add_argument("--theta", help="coefficients of theta~ in the simple coroots")
    dm.add_argument("--levi")
    ad = sub.add_parser("adhm", help="report on an ADHM datum file")
    ad.add_argument("datum", help="ADHM datum JSON")
    ad.add_argument("--word-length", type=int, default=3)
    ad.add_argument("--out", metavar="PATH")
    ad.add_argument("--format", choices=("tsv", "json"), default="tsv")
    ad.add_argument("-v", "--verbose", action="store_true")
    return p


COMMANDS = {
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
    "parabolic": cmd_parabolic,
    "stalk": cmd_stalk,
    "dims": cmd_dims,
    "adhm": cmd_adhm,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.verb](args)
    except (InputError, RootDatumError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
