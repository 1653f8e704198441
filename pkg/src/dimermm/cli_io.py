"""Dimer file format, the bundled corpus and the command line interface."""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

from .classgroup import ToricCone, class_group, classify, display
from .consistency import check_consistency, check_rcharge
from .dimer_core import BLACK, WHITE, DimerError, DimerModel, Edge, dual_qp, validate
from .exchange import (
    ExchangeError,
    all_generators,
    build_exchange_graph,
    check_mm1_connected,
    is_connected,
    presentations,
    realizing_mutations,
    unimodular_maps,
)
from .matchings import MatchingError, convex_hull, enumerate_matchings, extremals_in_order, pm_polygon
from .mm_generators import GeneratorError, SplittingModule, generator, ideal_vectors, mutate_generator
from .qp_mutation import MutationError, mutable_vertices, mutate_dimer

TOP_KEYS = {"vertices", "edges", "rotations"}
OPTIONAL_KEYS = {"comment", "type", "faces", "base_matching"}
EDGE_KEYS = {"id", "white", "black", "dx", "dy"}
VERTEX_KEYS = {"id", "color"}


class FormatError(ValueError):
    pass


def _expect(cond: bool, where: str, msg: str) -> None:
    if not cond:
        raise FormatError("%s: %s" % (where, msg))


def dimer_from_dict(obj) -> DimerModel:
    _expect(isinstance(obj, dict), "top level", "expected an object")
    missing = TOP_KEYS - set(obj)
    _expect(not missing, "top level", "missing key(s) %s" % ", ".join(sorted(missing)))
    unknown = set(obj) - TOP_KEYS - OPTIONAL_KEYS
    _expect(not unknown, "top level", "unknown key(s) %s" % ", ".join(sorted(unknown)))
    verts = []
    for n, v in enumerate(obj["vertices"]):
        where = "vertices[%d]" % n
        _expect(isinstance(v, dict) and set(v) == VERTEX_KEYS, where, "expected keys id, color")
        _expect(isinstance(v["id"], str), where, "id must be a string")
        _expect(v["color"] in (BLACK, WHITE), where, "color must be black or white")
        verts.append((v["id"], v["color"]))
    edges = []
    for n, e in enumerate(obj["edges"]):
        where = "edges[%d]" % n
        _expect(isinstance(e, dict) and set(e) == EDGE_KEYS, where, "expected keys id, white, black, dx, dy")
        for k in ("id", "white", "black"):
            _expect(isinstance(e[k], str), where, "%s must be a string" % k)
        for k in ("dx", "dy"):
            _expect(isinstance(e[k], int) and not isinstance(e[k], bool), where, "%s must be an integer" % k)
        edges.append(Edge(e["id"], e["white"], e["black"], e["dx"], e["dy"]))
    vids = [v for v, _ in verts]
    eids = [e.id for e in edges]
    _expect(len(set(vids)) == len(vids), "vertices", "duplicate vertex id")
    _expect(len(set(eids)) == len(eids), "edges", "duplicate edge id")
    for e in edges:
        _expect(e.white in vids and e.black in vids, "edges." + e.id, "unknown endpoint")
    rots = obj["rotations"]
    _expect(isinstance(rots, dict), "rotations", "expected an object")
    _expect(set(rots) == set(vids), "rotations", "keys must be exactly the vertex ids")
    for v, r in rots.items():
        _expect(isinstance(r, list) and all(isinstance(x, str) for x in r), "rotations.%s" % v, "expected a list of edge ids")
        _expect(all(x in eids for x in r), "rotations.%s" % v, "unknown edge id")
    faces = obj.get("faces")
    if faces is not None:
        _expect(isinstance(faces, dict), "faces", "expected an object")
        for k, dt in faces.items():
            _expect(isinstance(dt, list) and len(dt) == 2, "faces.%s" % k, "expected [vertex-id, edge-id]")
        faces = {k: tuple(v) for k, v in faces.items()}
    bm = obj.get("base_matching")
    if bm is not None:
        _expect(isinstance(bm, list), "base_matching", "expected a list of edge ids")
    return DimerModel.build(verts, edges, rots, faces, bm, obj.get("comment", ""), obj.get("type"))


def parse_dimer(text: str) -> DimerModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as ex:
        raise FormatError("line %d column %d: %s" % (ex.lineno, ex.colno, ex.msg)) from None
    return dimer_from_dict(obj)


def dimer_to_dict(d: DimerModel) -> dict:
    out = {
        "vertices": [{"id": v, "color": c} for v, c in d.vertices],
        "edges": [{"id": e.id, "white": e.white, "black": e.black, "dx": e.dx, "dy": e.dy} for e in d.edges],
        "rotations": {v: list(r) for v, r in d.rotations},
    }
    if d.comment:
        out["comment"] = d.comment
    if d.type is not None:
        out["type"] = d.type
    if d.face_labels:
        out["faces"] = {k: list(v) for k, v in d.face_labels}
    if d.base_matching is not None:
        out["base_matching"] = list(d.base_matching)
    return out


def serialize_dimer(d: DimerModel) -> str:
    return json.dumps(dimer_to_dict(d), indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------- corpus


def _data_dir() -> Path:
    return Path(str(resources.files("dimermm") / "data"))


class Corpus:
    """Named polygons, bundled dimers and reference data."""

    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else _data_dir()
        self._dimers: Dict[str, DimerModel] = {}

    def _json(self, rel: str):
        p = self.root / rel
        if not p.exists():
            return {}
        with open(p, encoding="utf-8") as fh:
            return json.load(fh)

    @property
    def polygons(self) -> Dict[str, dict]:
        return self._json("polygons.json")

    def polygon(self, t: str) -> List[tuple]:
        if t not in self.polygons:
            raise KeyError("unknown polygon type %r" % t)
        return [tuple(v) for v in self.polygons[t]["vertices"]]

    def display_slots(self, t: str) -> Optional[List[int]]:
        return self.polygons.get(t, {}).get("display_slots")

    def names(self) -> List[str]:
        return sorted(p.stem for p in (self.root / "dimers").glob("*.json"))

    def dimer(self, name: str) -> DimerModel:
        if name not in self._dimers:
            p = self.root / "dimers" / (name + ".json")
            if not p.exists():
                raise KeyError("no corpus dimer named %r" % name)
            self._dimers[name] = parse_dimer(p.read_text(encoding="utf-8"))
        return self._dimers[name]

    def dimers_of_type(self, t: str) -> List[str]:
        return [n for n in self.names() if self.dimer(n).type == t]

    def types(self) -> List[str]:
        return sorted(self.polygons)

    @property
    def tables(self) -> dict:
        return self._json("reference/tables.json")

    @property
    def exchange(self) -> dict:
        return self._json("reference/exchange.json")

    @property
    def class_groups(self) -> dict:
        return self._json("reference/classgroups.json")


def dimer_letter(name: str) -> str:
    """Presentation letter for a corpus name: 6a-2 -> B, 6a-2p -> B', 3a -> A."""
    if "-" not in name:
        return "A"
    tail = name.split("-", 1)[1]
    digits = "".join(ch for ch in tail if ch.isdigit())
    primes = tail.count("p")
    return chr(ord("A") + int(digits) - 1) + "'" * primes


# ---------------------------------------------------------------- command line


class InputError(Exception):
    """Bad command line input; exit code 2."""


def _load_dimer(arg: str, corpus: Corpus) -> DimerModel:
    if arg.startswith("corpus:"):
        try:
            return corpus.dimer(arg[len("corpus:"):])
        except KeyError as ex:
            raise InputError(str(ex.args[0])) from None
    p = Path(arg)
    if not p.exists():
        raise InputError("no such file: %s" % arg)
    return parse_dimer(p.read_text(encoding="utf-8"))


def _parse_polygon(arg: str, corpus: Corpus) -> Tuple[List[tuple], Optional[str]]:
    if arg in corpus.polygons:
        return corpus.polygon(arg), arg
    nums = [int(x) for x in re.findall(r"-?\d+", arg)]
    if len(nums) < 6 or len(nums) % 2:
        raise InputError("polygon must be a type name or a list of integer points, got %r" % arg)
    pts = list(zip(nums[::2], nums[1::2]))
    hull = convex_hull(pts)
    if sorted(hull) != sorted(set(pts)):
        raise InputError("polygon points must be the strict vertices of a convex polygon")
    return _pinned_order(hull), None


def _pinned_order(hull: Sequence[tuple]) -> List[tuple]:
    """Counterclockwise order starting from the lexicographically smallest vertex."""
    hull = list(hull)
    i = hull.index(min(hull))
    return hull[i:] + hull[:i]


def _polygon_for(d: DimerModel, corpus: Corpus) -> List[tuple]:
    if d.type and d.type in corpus.polygons:
        return corpus.polygon(d.type)
    return _pinned_order(pm_polygon(d).hull)


def _fmt_vec(u) -> str:
    return ",".join(str(x) for x in u)


def cmd_matchings(args, corpus: Corpus, out: TextIO) -> int:
    d = _load_dimer(args.dimer, corpus)
    for P in enumerate_matchings(d):
        out.write(" ".join(P) + "\n")
    return 0


def cmd_polygon(args, corpus: Corpus, out: TextIO) -> int:
    d = _load_dimer(args.dimer, corpus)
    poly = pm_polygon(d)
    out.write("x\ty\tmult\tis_hull_vertex\n")
    for (x, y), m in poly.multiplicity:
        out.write("%d\t%d\t%d\t%d\n" % (x, y, m, int((x, y) in poly.hull)))
    return 0


def cmd_consistency(args, corpus: Corpus, out: TextIO) -> int:
    d = _load_dimer(args.dimer, corpus)
    rep = check_consistency(d)
    out.write("nondegenerate\t%s\n" % str(rep.nondegenerate).lower())
    out.write("rcharge_feasible\t%s\n" % str(rep.rcharge_feasible).lower())
    out.write("hull_multiplicities_one\t%s\n" % str(rep.multiplicities_one).lower())
    out.write("consistent\t%s\n" % str(rep.consistent).lower())
    if rep.rcharge is not None:
        out.write("edge\tnumerator\tdenominator\n")
        for e in sorted(rep.rcharge):
            r = rep.rcharge[e]
            out.write("%s\t%d\t%d\n" % (e, r.numerator, r.denominator))
    return 0 if rep.consistent else 1


def cmd_mutate(args, corpus: Corpus, out: TextIO) -> int:
    d = _load_dimer(args.dimer, corpus)
    seq = []
    if args.vertex is not None:
        seq.append(args.vertex)
    if args.steps:
        seq += [s.strip() for s in args.steps.split(",") if s.strip()]
    if not seq:
        raise InputError("give --vertex or --steps")
    for k in seq:
        q = dual_qp(d)
        if k not in q.vertices:
            raise InputError("no quiver vertex %r" % k)
        if k not in mutable_vertices(q):
            raise InputError("vertex %s is not mutable (mutable: %s)" % (k, ", ".join(mutable_vertices(q)) or "none"))
        d = mutate_dimer(d, k)
    if args.show_qp:
        for line in dual_qp(d).format_potential():
            out.write(line + "\n")
    else:
        out.write(serialize_dimer(d))
    return 0


def cmd_classgroup(args, corpus: Corpus, out: TextIO) -> int:
    verts, _ = _parse_polygon(args.polygon, corpus)
    cl = class_group(ToricCone.from_polygon(verts))
    out.write("group\t%s\n" % cl.describe())
    out.write("rank\t%d\n" % cl.rank)
    out.write("torsion\t%s\n" % (_fmt_vec(cl.invariants) or "-"))
    for i, row in enumerate(cl.projection):
        if i < len(cl.diagonal):
            kind = "torsion/%d" % cl.diagonal[i] if cl.diagonal[i] > 1 else "trivial"
        else:
            kind = "free"
        out.write("row%d\t%s\t%s\n" % (i, kind, "\t".join(str(x) for x in row)))
    return 0


def cmd_tilting_table(args, corpus: Corpus, out: TextIO) -> int:
    d = _load_dimer(args.dimer, corpus)
    if args.polygon:
        verts, t = _parse_polygon(args.polygon, corpus)
    else:
        verts, t = _polygon_for(d, corpus), d.type
    q = dual_qp(d)
    if args.vertex not in q.vertices:
        raise InputError("no quiver vertex %r" % args.vertex)
    cl = class_group(ToricCone.from_polygon(verts))
    ex = extremals_in_order(d, verts)
    vecs = ideal_vectors(d, args.vertex, ex)
    slots = corpus.display_slots(t) if t else None
    out.write("j\tvector\tclass\trepresentative\n")
    for j in q.vertices:
        c = classify(cl, vecs[j])
        out.write("%s\t%s\t%s\t%s\n" % (j, _fmt_vec(vecs[j]), c, display(cl, c, slots)))
    return 0


def _type_corpus(corpus: Corpus, t: str) -> List[Tuple[str, DimerModel]]:
    return [(dimer_letter(n), corpus.dimer(n)) for n in corpus.dimers_of_type(t)]


def cmd_exchange_graph(args, corpus: Corpus, out: TextIO) -> int:
    if args.type:
        if args.type not in corpus.polygons:
            raise InputError("unknown type %r" % args.type)
        verts = corpus.polygon(args.type)
        dimers = _type_corpus(corpus, args.type)
        if not dimers:
            raise InputError("no corpus dimers of type %s" % args.type)
    else:
        if not args.polygon or not args.dimers:
            raise InputError("give --type, or --polygon with --dimers")
        verts, _ = _parse_polygon(args.polygon, corpus)
        dimers = [(chr(ord("A") + n), _load_dimer(f, corpus)) for n, f in enumerate(args.dimers)]
    cl = class_group(ToricCone.from_polygon(verts))
    g = build_exchange_graph(all_generators(verts, dimers, cl))
    conn = is_connected(g)
    if args.format == "tsv":
        out.write("node\tlabel\n")
        for i, n in enumerate(g.nodes):
            out.write("%d\t%s\n" % (i, n.tag))
        out.write("a\tb\n")
        for a, b in g.edges:
            out.write("%d\t%d\n" % (a, b))
        out.write("connected\t%s\n" % str(conn).lower())
    else:
        out.write(g.to_dot())
        out.write("// connected: %s\n" % str(conn).lower())
    return 0


# ---------------------------------------------------------------- verification


class Checks:
    def __init__(self, out: TextIO):
        self.out = out
        self.failed = 0
        self.passed = 0

    def __call__(self, ok: bool, what: str, detail: str = "") -> bool:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
        self.out.write("%s\t%s%s\n" % ("PASS" if ok else "FAIL", what, ("\t" + detail) if detail and not ok else ""))
        return ok


def _reference_nodes(ref: dict, g, cl) -> Dict[str, Optional[int]]:
    index = {}
    for lab, vecs in ref["nodes"].items():
        if vecs is not None:
            want = SplittingModule.of([classify(cl, u) for u in vecs])
            hits = [i for i, n in enumerate(g.nodes) if n == want]
        else:
            alias = lab.replace("e_", "e").replace("^*", "*")
            hits = [i for i, n in enumerate(g.nodes) if alias in n.aliases]
        index[lab] = hits[0] if len(hits) == 1 else None
    return index


def verify_type(t: str, corpus: Corpus, check: Checks, coherence: bool = True) -> None:
    verts = corpus.polygon(t)
    cl = class_group(ToricCone.from_polygon(verts))
    exp = corpus.class_groups.get(t)
    if exp is not None:
        check(cl.rank == exp["rank"] and list(cl.invariants) == exp["torsion"],
              "%s class group %s" % (t, cl.describe()), "expected rank %d torsion %s" % (exp["rank"], exp["torsion"]))
    names = corpus.dimers_of_type(t)
    tables = corpus.tables
    for n in names:
        d = corpus.dimer(n)
        check(validate(d).ok, "%s well formed" % n)
        rep = check_consistency(d)
        check(rep.consistent and rep.multiplicities_one and check_rcharge(dual_qp(d), rep.rcharge),
              "%s consistent" % n)
        check(bool(unimodular_maps(list(pm_polygon(d).hull), verts)), "%s polygon of type %s" % (n, t))
        if n in tables:
            ex = extremals_in_order(d, verts)
            bad = []
            for i, row in tables[n].items():
                G = generator(d, i, ex, cl)
                have = G.by_vertex()
                bad += ["T%s%s" % (i, j) for j, u in row.items() if have[j] != classify(cl, u)]
            check(not bad, "%s ideal tables" % n, " ".join(bad[:8]))
    if not names:
        return
    dims = _type_corpus(corpus, t)
    pres = presentations(verts, dims, cl)
    gens = all_generators(verts, dims, cl)
    g = build_exchange_graph(gens)
    check(is_connected(g), "%s exchange graph connected (%d nodes, %d edges)" % (t, len(g.nodes), len(g.edges)))
    ref = corpus.exchange.get(t)
    if ref is not None:
        idx = _reference_nodes(ref, g, cl)
        missing = sorted(k for k, v in idx.items() if v is None)
        check(not missing and len(idx) == len(g.nodes), "%s exchange graph nodes" % t,
              "expected %d, have %d, unmatched %s" % (len(idx), len(g.nodes), " ".join(missing[:6])))
        if not missing:
            want = {tuple(sorted((idx[a], idx[b]))) for a, b in ref["edges"]}
            check(want == set(g.edges), "%s exchange graph edges" % t,
                  "%d expected, %d found" % (len(want), len(g.edges)))
    if coherence:
        real = realizing_mutations(g, pres)
        lost = [e for e, v in real.items() if not v]
        check(not lost, "%s every exchange edge is a single mutation" % t, "%d edges unrealized" % len(lost))
        bad = 0
        for n in names:
            d = corpus.dimer(n)
            q = dual_qp(d)
            ex = extremals_in_order(d, verts)
            for k in mutable_vertices(q):
                m = mutate_dimer(d, k, check=False)
                exm = extremals_in_order(m, verts)
                for i in q.vertices:
                    if i != k and mutate_generator(generator(d, i, ex, cl), q, k) != generator(m, i, exm, cl):
                        bad += 1
        check(bad == 0, "%s generator mutation matches dimer mutation" % t, "%d disagreements" % bad)
    ok, wit = check_mm1_connected(gens, cl)
    check(ok, "%s splitting MM modules connected by twists (%d witnesses)" % (t, len(wit)))


def cmd_verify(args, corpus: Corpus, out: TextIO) -> int:
    check = Checks(out)
    if args.all:
        types = corpus.types()
    elif args.type:
        if args.type not in corpus.polygons:
            raise InputError("unknown type %r" % args.type)
        types = [args.type]
    else:
        raise InputError("give --type or --all")
    for t in types:
        verify_type(t, corpus, check)
    if args.all:
        for n in corpus.names():
            d = corpus.dimer(n)
            check(serialize_dimer(d) == (corpus.root / "dimers" / (n + ".json")).read_text(encoding="utf-8"),
                  "%s file is in canonical form" % n)
            if d.type is None:
                rep = check_consistency(d)
                check(rep.consistent, "%s consistent" % n)
    out.write("summary\t%d passed\t%d failed\n" % (check.passed, check.failed))
    return 1 if check.failed else 0


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus-dir", default=argparse.SUPPRESS, help="directory holding polygons.json, dimers/ and reference/")
    common.add_argument("--format", choices=["tsv", "dot"], default=argparse.SUPPRESS, help="output format for graphs")
    common.add_argument("--seedless", action="store_true", default=argparse.SUPPRESS, help="accepted for compatibility; nothing is random")
    p = argparse.ArgumentParser(prog="dimermm", parents=[common],
                                description="Dimer models, QP mutation, class groups and exchange graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    dimer_help = "dimer JSON file, or corpus:NAME"
    sp = add("matchings", cmd_matchings, "list perfect matchings")
    sp.add_argument("dimer", help=dimer_help)
    sp = add("polygon", cmd_polygon, "perfect matching polygon with multiplicities")
    sp.add_argument("dimer", help=dimer_help)
    sp = add("consistency", cmd_consistency, "consistency report and R-charge witness")
    sp.add_argument("dimer", help=dimer_help)
    sp = add("mutate", cmd_mutate, "mutate a dimer at a face")
    sp.add_argument("dimer", help=dimer_help)
    sp.add_argument("--vertex")
    sp.add_argument("--steps", help="comma separated vertices, applied after --vertex")
    sp.add_argument("--show-qp", action="store_true", help="print the potential instead of the dimer")
    sp = add("classgroup", cmd_classgroup, "class group of a polygon's cone")
    sp.add_argument("--polygon", required=True, help="type name such as 4a, or points like '1,0 0,1 -1,-1'")
    sp = add("tilting-table", cmd_tilting_table, "divisorial ideals T_ij from a base vertex")
    sp.add_argument("dimer", help=dimer_help)
    sp.add_argument("--vertex", required=True)
    sp.add_argument("--polygon", help="target polygon (default: the dimer's type)")
    sp = add("exchange-graph", cmd_exchange_graph, "exchange graph of splitting generators")
    sp.add_argument("--type")
    sp.add_argument("--polygon")
    sp.add_argument("--dimers", nargs="+")
    sp = add("verify", cmd_verify, "check a type against the bundled reference data")
    sp.add_argument("--type")
    sp.add_argument("--all", action="store_true")
    return p


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)
    for k, v in (("corpus_dir", None), ("format", "dot"), ("seedless", False)):
        if not hasattr(args, k):
            setattr(args, k, v)
    corpus = Corpus(Path(args.corpus_dir) if args.corpus_dir else None)
    try:
        return args.func(args, corpus, out)
    except (InputError, FormatError, DimerError, MutationError, MatchingError, GeneratorError, ExchangeError) as ex:
        err.write("error: %s\n" % ex)
        return 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)
