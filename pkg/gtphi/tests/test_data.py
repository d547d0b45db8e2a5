import json

import pytest

from gtphi.data import (
    DataError,
    Graph,
    graph_from_payload,
    load_dataset,
    read_instance_graph,
    split_instances,
)

INSTANCE_TEXT = """geo-mapf v1
world box
bounds 0 0 1 1
rects 1
0.1 0.1 0.2 0.2
V 3
0 0.5 0.5
1 0.80000000000000004 0.5
2 0.5 0.90000000000000002
E 5
0 0
0 1
1 1
2 0
2 2
A 2
0 1
1 2
R 0.040000000000000001
"""


def write_dataset(tmp_path, records, header="geo-mapf-ds v1"):
    (tmp_path / "instances").mkdir()
    (tmp_path / "samples").mkdir()
    (tmp_path / "instances" / "i0.txt").write_text(INSTANCE_TEXT)
    lines = [header] + [json.dumps(r) for r in records]
    (tmp_path / "samples" / "i0.jsonl").write_text("\n".join(lines) + "\n")


class TestInstanceGraph:
    def test_parse(self, tmp_path):
        p = tmp_path / "i.txt"
        p.write_text(INSTANCE_TEXT)
        g = read_instance_graph(str(p))
        assert g.positions == [(0.5, 0.5), (0.8, 0.5), (0.5, 0.9)]
        assert g.edges == [(0, 0), (0, 1), (1, 1), (2, 0), (2, 2)]

    def test_bad_header(self, tmp_path):
        p = tmp_path / "i.txt"
        p.write_text("something else\n")
        with pytest.raises(DataError, match="header"):
            read_instance_graph(str(p))

    def test_truncated(self, tmp_path):
        p = tmp_path / "i.txt"
        p.write_text("\n".join(INSTANCE_TEXT.splitlines()[:8]) + "\n")
        with pytest.raises(DataError, match="end of file"):
            read_instance_graph(str(p))


class TestGraphPayload:
    def test_round_trip(self):
        g = graph_from_payload({"v": [[0.0, 0.0], [1.0, 2.0]], "e": [[0, 1], [1, 1]]})
        assert g == Graph([(0.0, 0.0), (1.0, 2.0)], [(0, 1), (1, 1)])

    def test_unknown_vertex(self):
        with pytest.raises(DataError, match="unknown vertex"):
            graph_from_payload({"v": [[0.0, 0.0]], "e": [[0, 3]]})

    def test_malformed(self):
        with pytest.raises(DataError):
            graph_from_payload({"v": [[0.0, 0.0]]})


class TestLoadDataset:
    def test_load(self, tmp_path):
        write_dataset(tmp_path, [
            {"solution": [[0, 1], [2, 2, 0]], "depth": 0, "label": "positive"},
            {"solution": [[0, 1], [2, 0]], "depth": 1, "label": "negative"},
        ])
        graphs, samples = load_dataset(str(tmp_path))
        assert set(graphs) == {"i0"}
        assert [s.label for s in samples] == ["positive", "negative"]
        assert samples[0].instance_id == "i0" and samples[1].depth == 1

    def test_bad_sample_header(self, tmp_path):
        write_dataset(tmp_path, [], header="nope")
        with pytest.raises(DataError, match="header"):
            load_dataset(str(tmp_path))

    def test_unknown_solution_vertex(self, tmp_path):
        write_dataset(tmp_path, [{"solution": [[0, 9]], "depth": 0, "label": "positive"}])
        with pytest.raises(DataError, match="unknown vertex"):
            load_dataset(str(tmp_path))

    def test_bad_label(self, tmp_path):
        write_dataset(tmp_path, [{"solution": [[0]], "depth": 0, "label": "meh"}])
        with pytest.raises(DataError, match="label"):
            load_dataset(str(tmp_path))

    def test_not_a_dataset(self, tmp_path):
        with pytest.raises(DataError, match="dataset"):
            load_dataset(str(tmp_path / "missing"))


class TestSplit:
    def test_deterministic_disjoint(self):
        ids = [f"i{k}" for k in range(20)]
        train1, val1 = split_instances(ids, 0.1, seed=7)
        train2, val2 = split_instances(list(reversed(ids)), 0.1, seed=7)
        assert (train1, val1) == (train2, val2)
        assert not set(train1) & set(val1)
        assert sorted(train1 + val1) == sorted(ids)
        assert len(val1) == 2

    def test_single_instance_no_holdout(self):
        train, val = split_instances(["only"], 0.1, seed=0)
        assert train == ["only"] and val == []
