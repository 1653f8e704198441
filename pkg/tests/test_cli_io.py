import io
import json

import pytest

from dimermm.cli_io import (
    Corpus,
    FormatError,
    dimer_from_dict,
    dimer_letter,
    dimer_to_dict,
    parse_dimer,
    run,
    serialize_dimer,
)
from dimermm.dimer_core import validate
from dimermm.qp_mutation import dimers_isomorphic

from conftest import CORPUS


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_round_trip_every_file():
    for n in CORPUS.names():
        path = CORPUS.root / "dimers" / (n + ".json")
        text = path.read_text(encoding="utf-8")
        d = parse_dimer(text)
        assert serialize_dimer(d) == text
        assert dimer_from_dict(dimer_to_dict(d)) == d


def test_4a_file():
    d = CORPUS.dimer("4a-1")
    assert (len(d.vertices), len(d.edges)) == (4, 8)
    assert d.type == "4a"


def test_format_errors():
    base = dimer_to_dict(CORPUS.dimer("conifold"))
    for mutate in (
        lambda o: o.update(extra=1),
        lambda o: o.pop("edges"),
        lambda o: o["edges"][0].update(dx="1"),
        lambda o: o["vertices"][0].update(color="red"),
        lambda o: o["edges"][0].update(white="nobody"),
    ):
        obj = json.loads(json.dumps(base))
        mutate(obj)
        with pytest.raises(FormatError):
            dimer_from_dict(obj)
    with pytest.raises(FormatError):
        parse_dimer("{not json")


def test_corpus_metadata():
    assert len(CORPUS.names()) == 33
    assert dimer_letter("4a-1") == "A" and dimer_letter("6a-2p") == "B'"
    assert CORPUS.dimers_of_type("4a") == ["4a-1", "4a-2"]
    with pytest.raises(Exception):
        Corpus().dimer("nonexistent")


def test_cli_matchings():
    code, out, _ = cli("matchings", "corpus:4a-1")
    assert code == 0 and len(out.splitlines()) == 8


def test_cli_polygon():
    code, out, _ = cli("polygon", "corpus:4a-1")
    rows = [line.split("\t") for line in out.splitlines()[1:]]
    assert code == 0 and len(rows) == 5
    assert sorted(int(r[2]) for r in rows) == [1, 1, 1, 1, 4]
    assert sum(int(r[3]) for r in rows) == 4


def test_cli_consistency(tmp_path):
    code, out, _ = cli("consistency", "corpus:conifold")
    assert code == 0 and "consistent\ttrue" in out
    assert "e01\t1\t2" in out


def test_cli_mutate(tmp_path):
    code, out, _ = cli("mutate", "corpus:4a-1", "--vertex", "0")
    assert code == 0
    m = parse_dimer(out)
    assert validate(m).ok and dimers_isomorphic(m, CORPUS.dimer("4a-2"))
    f = tmp_path / "m.json"
    f.write_text(out)
    code, out2, _ = cli("mutate", str(f), "--vertex", "0")
    assert code == 0 and dimers_isomorphic(parse_dimer(out2), CORPUS.dimer("4a-1"))
    code, out3, _ = cli("mutate", "corpus:4a-1", "--steps", "0,0")
    assert code == 0 and dimers_isomorphic(parse_dimer(out3), CORPUS.dimer("4a-1"))
    code, qp, _ = cli("mutate", "corpus:4a-1", "--vertex", "0", "--show-qp")
    assert code == 0 and len(qp.splitlines()) == 8


def test_cli_mutate_errors():
    assert cli("mutate", "corpus:4a-1", "--vertex", "99")[0] == 2
    assert cli("mutate", "corpus:conifold", "--vertex", "0")[0] == 2
    assert cli("mutate", "corpus:4a-1")[0] == 2
    assert cli("matchings", "corpus:nope")[0] == 2
    assert cli("matchings", "/no/such/file.json")[0] == 2


def test_cli_classgroup():
    code, out, _ = cli("classgroup", "--polygon", "4a")
    assert code == 0 and out.startswith("group\tZ x Z/2\n")
    code, out, _ = cli("classgroup", "--polygon", "1,0 0,1 -1,-1")
    assert code == 0 and "group\tZ/3" in out
    assert cli("classgroup", "--polygon", "zz")[0] == 2


def test_cli_tilting_table():
    code, out, _ = cli("tilting-table", "corpus:4a-1", "--vertex", "1")
    assert code == 0
    rows = {r.split("\t")[0]: r.split("\t") for r in out.splitlines()[1:]}
    assert rows["0"][3] == "T(2,1,0,0)" and rows["1"][3] == "R"


def test_cli_exchange_graph():
    code, out, _ = cli("exchange-graph", "--type", "4a")
    assert code == 0 and out.count("--") == 6 and "// connected: true" in out
    assert 'label="e0A"' in out
    code, out, _ = cli("exchange-graph", "--type", "5b", "--format", "tsv")
    assert code == 0 and out.endswith("connected\ttrue\n")
    code, out, _ = cli("--format", "tsv", "exchange-graph", "--polygon", "4a",
                       "--dimers", "corpus:4a-1", "corpus:4a-2")
    assert code == 0 and "connected\ttrue" in out
    assert cli("exchange-graph", "--type", "4c")[0] == 2
    assert cli("exchange-graph")[0] == 2


def test_cli_verify():
    code, out, _ = cli("verify", "--type", "4b")
    assert code == 0 and "\t0 failed" in out
    assert cli("verify")[0] == 2


def test_cli_seedless_and_help():
    assert cli("--seedless", "matchings", "corpus:conifold")[0] == 0
    assert cli("--help")[0] == 0


def test_corpus_dir(tmp_path):
    code, out, _ = cli("--corpus-dir", str(CORPUS.root), "matchings", "corpus:conifold")
    assert code == 0 and len(out.splitlines()) == 4


def test_reference_errors():
    base = dimer_to_dict(CORPUS.dimer("conifold"))
    for mutate in (
        lambda o: o["rotations"].pop(next(iter(o["rotations"]))),
        lambda o: o["rotations"][next(iter(o["rotations"]))].append("zz"),
        lambda o: o["edges"].append(dict(o["edges"][0])),
    ):
        obj = json.loads(json.dumps(base))
        mutate(obj)
        with pytest.raises(FormatError):
            dimer_from_dict(obj)
