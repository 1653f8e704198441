"""Mutation of quivers with potential and of dimer models.

Potentials are finite signed sums of cycles keyed by their canonical
rotation. Premutation follows the usual three steps (reverse the arrows at
k, add composite arrows, rewrite the potential); for vertices with two
incoming and two outgoing arrows the extra cubic terms carry the dimer sign
rule, which keeps the result dual to a dimer.
"""
from __future__ import annotations

from collections import deque
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .dimer_core import (
    Arrow,
    Cycle,
    DimerError,
    DimerModel,
    QuiverWithPotential,
    canonical_cycle,
    dimer_from_qp,
    dual_qp,
    validate,
)


class MutationError(ValueError):
    pass


def rev(x: str) -> str:
    """Name of the reversed arrow: a -> a*, a* -> a."""
    return x[:-1] if x.endswith("*") else x + "*"


def composite(a: str, b: str) -> str:
    return "[%s%s]" % (a, b)


def has_loop(q: QuiverWithPotential, k: str) -> bool:
    return any(a.tail == k and a.head == k for a in q.arrows)


def on_two_cycle(q: QuiverWithPotential, k: str) -> bool:
    outs = {a.head for a in q.arrows if a.tail == k and a.head != k}
    ins = {a.tail for a in q.arrows if a.head == k and a.tail != k}
    return bool(outs & ins)


def mutable_vertices(q: QuiverWithPotential) -> List[str]:
    """Vertices without loops, off 2-cycles, with two incoming and two outgoing arrows."""
    out = []
    for k in q.vertices:
        if has_loop(q, k) or on_two_cycle(q, k):
            continue
        if len(q.in_arrows(k)) == 2 and len(q.out_arrows(k)) == 2:
            out.append(k)
    return out


def _rotate_off(cyc: Cycle, q: QuiverWithPotential, k: str) -> Cycle:
    """Rotate so the cycle does not start at k (no arrow pair through k is split)."""
    for i in range(len(cyc)):
        r = cyc[i:] + cyc[:i]
        if q.arrow[r[0]].tail != k:
            return r
    raise MutationError("cycle %s lies entirely at %s" % (cyc, k))


def _dimer_pairs(q: QuiverWithPotential, k: str) -> Optional[List[Tuple[str, str]]]:
    """Consecutive (in, out) pairs through k in the -1 cycles, when they give a perfect pairing."""
    pairs = []
    for cyc, c in q.potential:
        if c >= 0:
            continue
        n = len(cyc)
        for i in range(n):
            a, b = cyc[i], cyc[(i + 1) % n]
            if q.arrow[a].head == k and q.arrow[b].tail == k:
                pairs.append((a, b))
    ins = sorted(a.id for a in q.in_arrows(k))
    outs = sorted(a.id for a in q.out_arrows(k))
    if len(pairs) == 2 and sorted(p[0] for p in pairs) == ins and sorted(p[1] for p in pairs) == outs:
        return sorted(pairs)
    return None


def _add_disp(*vs):
    if any(v is None for v in vs):
        return None
    return (sum(v[0] for v in vs), sum(v[1] for v in vs))


def premutate(q: QuiverWithPotential, k: str, dimer_signs: Optional[bool] = None) -> QuiverWithPotential:
    """Premutation at k.

    With ``dimer_signs`` (default: whenever k is mutable and the -1 cycles
    through k pair its arrows), the cubic term of a composite [ab] gets sign
    +1 if a, b are consecutive in a -1 cycle and -1 otherwise.
    """
    if k not in q.vertices:
        raise MutationError("unknown vertex %r" % k)
    if has_loop(q, k):
        raise MutationError("vertex %s has a loop" % k)
    if on_two_cycle(q, k):
        raise MutationError("vertex %s lies on a 2-cycle" % k)
    ins = sorted(q.in_arrows(k), key=lambda a: a.id)
    outs = sorted(q.out_arrows(k), key=lambda a: a.id)
    pairs = _dimer_pairs(q, k)
    if dimer_signs is None:
        dimer_signs = pairs is not None and k in mutable_vertices(q)
    elif dimer_signs and pairs is None:
        raise MutationError("the -1 cycles through %s do not pair its arrows" % k)
    star = {a.id for a in ins} | {b.id for b in outs}
    arrows: List[Arrow] = [a for a in q.arrows if a.id not in star]
    for a in ins:
        arrows.append(Arrow(rev(a.id), k, a.tail, (-a.disp[0], -a.disp[1]) if a.disp else None))
    for b in outs:
        arrows.append(Arrow(rev(b.id), b.head, k, (-b.disp[0], -b.disp[1]) if b.disp else None))
    for a in ins:
        for b in outs:
            arrows.append(Arrow(composite(a.id, b.id), a.tail, b.head, _add_disp(a.disp, b.disp)))
    names = [x.id for x in arrows]
    if len(set(names)) != len(names):
        raise MutationError("arrow names collide after premutation at %s" % k)
    inset = {a.id for a in ins}
    pot: Dict[Tuple[str, ...], int] = {}

    def add(seq, c):
        key = canonical_cycle(seq)
        pot[key] = pot.get(key, 0) + c

    for cyc, c in q.potential:
        r = _rotate_off(cyc, q, k)
        new = []
        i = 0
        while i < len(r):
            x = r[i]
            if x in inset:
                if i + 1 >= len(r):
                    raise MutationError("cycle %s ends at %s after rotation" % (cyc, k))
                new.append(composite(x, r[i + 1]))
                i += 2
            else:
                new.append(x)
                i += 1
        add(new, c)
    pairset = set(pairs or [])
    for a in ins:
        for b in outs:
            sign = 1
            if dimer_signs:
                sign = 1 if (a.id, b.id) in pairset else -1
            add((rev(a.id), composite(a.id, b.id), rev(b.id)), sign)
    return QuiverWithPotential.build(q.vertices, arrows, pot)


def _mul(A: Dict[Tuple[str, ...], int], B: Dict[Tuple[str, ...], int]) -> Dict[Tuple[str, ...], int]:
    out: Dict[Tuple[str, ...], int] = {}
    for p, c in A.items():
        for s, e in B.items():
            out[p + s] = out.get(p + s, 0) + c * e
    return out


def two_cycle_terms(q: QuiverWithPotential) -> List[Tuple[Cycle, int]]:
    return [(cyc, c) for cyc, c in q.potential if len(cyc) == 2]


def reduce(q: QuiverWithPotential) -> QuiverWithPotential:
    """Split off the trivial part: remove 2-cycle terms and their arrows.

    For a term eps*x*y write W = eps*x*y + x*A + y*B + C; the reduced
    potential is C - eps*A*B with x, y deleted.
    """
    W: Dict[Tuple[str, ...], int] = dict(q.potential)
    arrows = {a.id: a for a in q.arrows}
    bound = len(two_cycle_terms(q)) + len(arrows)
    steps = 0
    while True:
        twos = sorted(cyc for cyc, c in W.items() if len(cyc) == 2 and c != 0)
        if not twos:
            break
        steps += 1
        if steps > bound:
            raise MutationError("reduction did not terminate")
        x, y = twos[0]
        eps = W[(x, y)]
        if eps not in (1, -1):
            raise MutationError("2-cycle %s%s has coefficient %d" % (x, y, eps))
        if x == y:
            raise MutationError("2-cycle %s%s is a loop square" % (x, y))
        A: Dict[Tuple[str, ...], int] = {}
        B: Dict[Tuple[str, ...], int] = {}
        C: Dict[Tuple[str, ...], int] = {}
        for cyc, c in W.items():
            if cyc == (x, y) or c == 0:
                continue
            nx, ny = cyc.count(x), cyc.count(y)
            if nx + ny == 0:
                C[cyc] = C.get(cyc, 0) + c
                continue
            if nx + ny > 1:
                raise MutationError("term %s meets the 2-cycle %s%s twice; reduction needs completion" % (cyc, x, y))
            i = cyc.index(x) if nx else cyc.index(y)
            r = cyc[i:] + cyc[:i]
            tgt = A if nx else B
            tgt[r[1:]] = tgt.get(r[1:], 0) + c
        for path, c in _mul(A, B).items():
            key = canonical_cycle(path)
            C[key] = C.get(key, 0) - eps * c
        W = {k: v for k, v in C.items() if v != 0}
        del arrows[x]
        del arrows[y]
    for cyc in W:
        for a in cyc:
            if a not in arrows:
                raise MutationError("arrow %s survives in W after deletion" % a)
    return QuiverWithPotential.build(q.vertices, arrows.values(), W)


def mutate_qp(q: QuiverWithPotential, k: str) -> QuiverWithPotential:
    return reduce(premutate(q, k))


# ---------------------------------------------------------------- dimers


def _gauge_off(q: QuiverWithPotential, forbidden: Set[str]) -> QuiverWithPotential:
    """Move the cut curves off the given arrows.

    Adding an integer vector to every arrow of one small cycle moves a dimer
    vertex across the cut and keeps all face sums. We look for such shifts
    making the displacement vanish on ``forbidden``.
    """
    cycles_of: Dict[str, List[Cycle]] = {}
    for cyc, _ in q.potential:
        for a in cyc:
            cycles_of.setdefault(a, []).append(cyc)
    shift: Dict[Cycle, Tuple[int, int]] = {}
    adj: Dict[Cycle, List[Tuple[Cycle, str]]] = {}
    for a in sorted(forbidden):
        c1, c2 = cycles_of[a]
        adj.setdefault(c1, []).append((c2, a))
        adj.setdefault(c2, []).append((c1, a))
    for root in sorted(adj):
        if root in shift:
            continue
        shift[root] = (0, 0)
        queue = deque([root])
        while queue:
            c = queue.popleft()
            for other, a in adj[c]:
                d = q.arrow[a].disp
                want = (-d[0] - shift[c][0], -d[1] - shift[c][1])
                if other not in shift:
                    shift[other] = want
                    queue.append(other)
                elif shift[other] != want:
                    raise MutationError("cannot move the cut off arrow %s" % a)
    arrows = []
    for a in q.arrows:
        dx, dy = a.disp
        for c in cycles_of[a.id]:
            s = shift.get(c, (0, 0))
            dx, dy = dx + s[0], dy + s[1]
        arrows.append(Arrow(a.id, a.tail, a.head, (dx, dy)))
    return QuiverWithPotential(q.vertices, tuple(arrows), q.potential)


def mutate_dimer(d: DimerModel, k: str, check: bool = True) -> DimerModel:
    """Mutation of a dimer at a face k in the mutable set of its quiver."""
    q = dual_qp(d)
    if k not in mutable_vertices(q):
        raise MutationError("face %s is not mutable" % k)
    trial = mutate_qp(q, k)
    deleted = {a.id for a in q.arrows} - {a.id for a in trial.arrows}
    star = {a.id for a in q.arrows if k in (a.tail, a.head)}
    qg = _gauge_off(q, star | deleted)
    out = dimer_from_qp(mutate_qp(qg, k))
    out = type(out)(out.vertices, out.edges, out.rotations, out.face_labels, None,
                    "mutation at %s" % k if not d.comment else "%s; mutated at %s" % (d.comment, k), d.type)
    if check:
        rep = validate(out)
        if not rep.ok:
            raise MutationError("mutated dimer is invalid: " + "; ".join(rep.problems))
        from .consistency import check_consistency
        if not check_consistency(out).consistent:
            raise MutationError("mutated dimer is not consistent")
    return out


# ---------------------------------------------------------------- isomorphism


def _gf2_solvable(rows: List[Tuple[Set[int], int]]) -> bool:
    """Solve sum_{i in S} s_i = b over GF(2)."""
    pivots: Dict[int, Tuple[Set[int], int]] = {}
    for S, b in rows:
        S = set(S)
        while S:
            p = min(S)
            if p not in pivots:
                pivots[p] = (S, b)
                break
            PS, pb = pivots[p]
            S = S ^ PS
            b ^= pb
        else:
            if b:
                return False
    return True


def qp_isomorphic(q1: QuiverWithPotential, q2: QuiverWithPotential) -> bool:
    """Vertex and arrow bijection carrying W1 onto W2, allowing arrow sign changes."""
    if len(q1.vertices) != len(q2.vertices) or len(q1.arrows) != len(q2.arrows):
        return False
    if sorted(len(c) for c, _ in q1.potential) != sorted(len(c) for c, _ in q2.potential):
        return False
    if sorted(abs(c) for _, c in q1.potential) != sorted(abs(c) for _, c in q2.potential):
        return False

    def degs(q):
        return sorted((len(q.in_arrows(v)), len(q.out_arrows(v))) for v in q.vertices)

    if degs(q1) != degs(q2):
        return False

    def succ(q):
        s: Dict[str, Set[str]] = {a.id: set() for a in q.arrows}
        for cyc, _ in q.potential:
            for i in range(len(cyc)):
                s[cyc[i]].add(cyc[(i + 1) % len(cyc)])
        return s

    def profile(q):
        # per arrow: sorted lengths of terms containing it
        p: Dict[str, List[int]] = {a.id: [] for a in q.arrows}
        for cyc, _ in q.potential:
            for a in cyc:
                p[a].append(len(cyc))
        return {a: tuple(sorted(v)) for a, v in p.items()}

    s1, s2 = succ(q1), succ(q2)
    p1, p2 = profile(q1), profile(q2)
    pred1: Dict[str, Set[str]] = {a: set() for a in s1}
    for a, bs in s1.items():
        for b in bs:
            pred1[b].add(a)
    # order arrows of q1 so each is linked to earlier ones where possible
    order: List[str] = []
    seen: Set[str] = set()
    for start in sorted(s1, key=lambda a: (-len(s1[a]), a)):
        if start in seen:
            continue
        queue = deque([start])
        seen.add(start)
        while queue:
            a = queue.popleft()
            order.append(a)
            for b in sorted(s1[a] | pred1[a]):
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
    W2 = q2.W
    amap: Dict[str, str] = {}
    vmap: Dict[str, str] = {}
    vinv: Dict[str, str] = {}
    used: Set[str] = set()
    terms1 = list(q1.potential)

    def vbind(u, w, trail):
        if u in vmap:
            return vmap[u] == w
        if w in vinv:
            return False
        vmap[u] = w
        vinv[w] = u
        trail.append(u)
        return True

    def finish() -> bool:
        idx = {a: i for i, a in enumerate(order)}
        rows = []
        for cyc, c in terms1:
            img = canonical_cycle([amap[a] for a in cyc])
            c2 = W2.get(img)
            if c2 is None or abs(c2) != abs(c):
                return False
            rows.append(({idx[a] for a in cyc if cyc.count(a) % 2 == 1}, 0 if c2 == c else 1))
        return _gf2_solvable(rows)

    def rec(n: int) -> bool:
        if n == len(order):
            return finish()
        a = order[n]
        A = q1.arrow[a]
        for b in sorted(q2.arrow):
            if b in used or p1[a] != p2[b]:
                continue
            B = q2.arrow[b]
            if (A.tail == A.head) != (B.tail == B.head):
                continue
            ok = True
            for x in s1[a]:
                if x in amap and amap[x] not in s2[b]:
                    ok = False
                    break
            if ok:
                for x in pred1[a]:
                    if x in amap and b not in s2[amap[x]]:
                        ok = False
                        break
            if not ok:
                continue
            trail: List[str] = []
            if vbind(A.tail, B.tail, trail) and vbind(A.head, B.head, trail):
                amap[a] = b
                used.add(b)
                if rec(n + 1):
                    return True
                del amap[a]
                used.discard(b)
            for u in trail:
                del vinv[vmap.pop(u)]
        return False

    return rec(0)


def dimers_isomorphic(d1: DimerModel, d2: DimerModel) -> bool:
    return qp_isomorphic(dual_qp(d1), dual_qp(d2))


def qp_from_terms(terms: Iterable[Tuple[Sequence[str], int]], names: Optional[Dict[str, str]] = None) -> QuiverWithPotential:
    """Build a QP from a potential alone, identifying vertices along the cycles.

    ``names`` optionally fixes vertex names: {arrow-id: name of its head}.
    """
    terms = [(tuple(c), e) for c, e in terms]
    parent: Dict[str, str] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    arrows = sorted({a for c, _ in terms for a in c})
    for c, _ in terms:
        for i in range(len(c)):
            union("h:" + c[i], "t:" + c[(i + 1) % len(c)])
    roots = sorted({find("h:" + a) for a in arrows} | {find("t:" + a) for a in arrows})
    label = {r: str(i) for i, r in enumerate(roots)}
    for a, nm in (names or {}).items():
        label[find("h:" + a)] = nm
    if len(set(label.values())) != len(label):
        raise DimerError("vertex names collide")
    arr = [Arrow(a, label[find("t:" + a)], label[find("h:" + a)]) for a in arrows]
    return QuiverWithPotential.build(label.values(), arr, dict(((c, e) for c, e in terms)))
