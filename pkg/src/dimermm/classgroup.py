"""Divisor class groups of toric cones via Smith normal form."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[int]]


class ClassGroupError(ValueError):
    pass


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence[int]]) -> Tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U A V = D diagonal, d1 | d2 | ..., U and V unimodular.

    Pivots are the smallest nonzero entry in absolute value of the remaining
    block, ties broken by (row, column).
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, r)) for r in A]
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add_row(src, dst, f):  # row dst += f * row src
        D[dst] = [x + f * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, f):
        for M in (D, V):
            for r in M:
                r[dst] += f * r[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]]
                if not bad:
                    break
                add_row(bad[0][0], t, 1)
                continue
            # move the smallest entry of row/column t to the pivot
            cands = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
            cands += [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
            _, i, j = min(cands)
            swap_rows(t, i)
            swap_cols(t, j)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


# ---------------------------------------------------------------- cones


@dataclass(frozen=True)
class ToricCone:
    generators: Tuple[Tuple[int, int, int], ...]

    @staticmethod
    def from_polygon(vertices: Sequence[Sequence[int]]) -> "ToricCone":
        return ToricCone(tuple((int(x), int(y), 1) for x, y in vertices))

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def lam(self) -> Matrix:
        """n x 3 matrix with rows lambda_i = <., v_i>."""
        return [list(v) for v in self.generators]


@dataclass(frozen=True, order=True)
class DivisorClass:
    free: Tuple[int, ...]
    torsion: Tuple[int, ...]
    moduli: Tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.torsion)

    def __str__(self) -> str:
        parts = [str(x) for x in self.free] + ["%d mod %d" % (t, m) for t, m in zip(self.torsion, self.moduli)]
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class GroupPresentation:
    n: int
    rank: int
    invariants: Tuple[int, ...]   # torsion invariants > 1
    projection: Tuple[Tuple[int, ...], ...]  # rows of U
    diagonal: Tuple[int, ...]     # full SNF diagonal of lambda
    lam: Tuple[Tuple[int, ...], ...]

    @property
    def torsion_rows(self) -> List[int]:
        return [i for i, d in enumerate(self.diagonal) if d > 1]

    @property
    def free_rows(self) -> List[int]:
        return list(range(len(self.diagonal), self.n))

    def describe(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append("Z^%d" % self.rank)
        for d in self.invariants:
            parts.append("Z/%d" % d)
        return " x ".join(parts) if parts else "0"


def class_group(c: ToricCone) -> GroupPresentation:
    lam = c.lam
    U, D, _ = smith_normal_form(lam)
    diag = [D[i][i] for i in range(min(len(D), 3)) if D[i][i] != 0]
    if len(diag) < 3:
        raise ClassGroupError("cone generators do not span a rank 3 lattice")
    return GroupPresentation(
        n=c.n,
        rank=c.n - 3,
        invariants=tuple(d for d in diag if d > 1),
        projection=tuple(tuple(r) for r in U),
        diagonal=tuple(diag),
        lam=tuple(tuple(r) for r in lam),
    )


def classify(cl: GroupPresentation, u: Sequence[int]) -> DivisorClass:
    if len(u) != cl.n:
        raise ClassGroupError("expected a vector of length %d, got %d" % (cl.n, len(u)))
    w = [sum(a * b for a, b in zip(row, u)) for row in cl.projection]
    return DivisorClass(
        free=tuple(w[i] for i in cl.free_rows),
        torsion=tuple(w[i] % cl.diagonal[i] for i in cl.torsion_rows),
        moduli=cl.invariants,
    )


def zero_class(cl: GroupPresentation) -> DivisorClass:
    return classify(cl, [0] * cl.n)


def basis_class(cl: GroupPresentation, j: int) -> DivisorClass:
    """[I_j] for j = 0 .. n-1."""
    return classify(cl, [int(i == j) for i in range(cl.n)])


def _check(a: DivisorClass, b: DivisorClass) -> None:
    if a.moduli != b.moduli or len(a.free) != len(b.free):
        raise ClassGroupError("classes belong to different presentations")


def class_add(a: DivisorClass, b: DivisorClass) -> DivisorClass:
    _check(a, b)
    return DivisorClass(
        tuple(x + y for x, y in zip(a.free, b.free)),
        tuple((x + y) % m for x, y, m in zip(a.torsion, b.torsion, a.moduli)),
        a.moduli,
    )


def class_neg(a: DivisorClass) -> DivisorClass:
    return DivisorClass(tuple(-x for x in a.free), tuple((-x) % m for x, m in zip(a.torsion, a.moduli)), a.moduli)


def class_sub(a: DivisorClass, b: DivisorClass) -> DivisorClass:
    return class_add(a, class_neg(b))


def is_gorenstein(c: ToricCone) -> bool:
    """Whether some x in Z^3 has <x, v_i> = 1 for all i."""
    lam = c.lam
    U, D, _ = smith_normal_form(lam)
    rank = sum(1 for i in range(min(len(D), 3)) if D[i][i] != 0)
    if rank < 3:
        raise ClassGroupError("cone generators do not span a rank 3 lattice")
    rhs = [sum(U[i]) for i in range(len(U))]
    for i, r in enumerate(rhs):
        if i < rank:
            if r % D[i][i]:
                return False
        elif r:
            return False
    return True


def subgroup_is_everything(cl: GroupPresentation, vectors: Sequence[Sequence[int]]) -> bool:
    """Whether the classes of ``vectors`` generate Cl."""
    cols = [list(v) for v in vectors] + [list(col) for col in zip(*cl.lam)]
    M = [list(r) for r in zip(*cols)]  # n x (k + 3)
    _, D, _ = smith_normal_form(M)
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    return len(diag) == cl.n and all(d == 1 for d in diag)


def representative(cl: GroupPresentation, c: DivisorClass, slots: Optional[Sequence[int]], radius: int = 6) -> Optional[Tuple[int, ...]]:
    """A vector supported on ``slots`` with class c, preferring few negative and small entries."""
    if slots is None:
        slots = list(range(cl.n))
    best = None
    for xs in itertools.product(range(-radius, radius + 1), repeat=len(slots)):
        u = [0] * cl.n
        for s, x in zip(slots, xs):
            u[s] = x
        key = (sum(1 for x in xs if x < 0), sum(abs(x) for x in xs), tuple(-x for x in xs))
        if (best is None or key < best[0]) and classify(cl, u) == c:
            best = (key, tuple(u))
    return None if best is None else best[1]


def display(cl: GroupPresentation, c: DivisorClass, slots: Optional[Sequence[int]]) -> str:
    u = representative(cl, c, slots)
    if u is None:
        return str(c)
    if u == tuple([0] * cl.n):
        return "R"
    return "T(%s)" % ",".join(str(x) for x in u)
