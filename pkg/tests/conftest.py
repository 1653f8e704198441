import itertools
from math import gcd

import pytest

from dimermm.cli_io import Corpus, dimer_letter
from dimermm.classgroup import ToricCone, class_group

CORPUS = Corpus()
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def corpus():
    return CORPUS


def cl_of(t):
    return class_group(ToricCone.from_polygon(CORPUS.polygon(t)))


def type_corpus(t):
    return [(dimer_letter(n), CORPUS.dimer(n)) for n in CORPUS.dimers_of_type(t)]


def det(M):
    if not M:
        return 1
    return sum((-1) ** j * M[0][j] * det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(len(M)))


def determinantal_invariants(A):
    """Invariant factors d_k = D_k / D_{k-1}, D_k the gcd of all k x k minors."""
    m, n = len(A), len(A[0])
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, det([[A[i][j] for j in cols] for i in rows]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title = ACCEPTANCE[n]
        terminalreporter.write_line("criterion %d: %s  %s" % (n, "PASS" if ok else "FAIL", title))
