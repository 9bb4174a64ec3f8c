"""Smoke test for the pyrealchip extension module."""

import json

import pyrealchip as rc


def main():
    g = rc.example1(4, 3, 0)
    inv = g.invariants()
    assert (inv["genus"], inv["s"], inv["a"]) == (4, 3, 0), inv
    assert inv["violations"] == []
    assert rc.RealGraph.from_json(g.to_json()).to_json() == g.to_json()

    for n in (2, 3, 4):
        h = rc.example2(rc.cycle_graph(n))
        assert rc.rank(h, {"v": 1}) == 0
        assert rc.real_rank(h, {"v": 1}) == 1

    c = rc.cycle_graph(3)
    witness = rc.linearly_equivalent(c, {"c0": 3}, {"c1": 3})
    assert witness is not None
    assert rc.linearly_equivalent(c, {"c0": 1}, {"c1": 1}) is None
    reduced, _ = rc.q_reduce(c, {"c1": 2}, "c0")
    assert rc.is_q_reduced(c, reduced, "c0")
    assert len(rc.complete_linear_system(c, {"c0": 2})) == 2

    m = rc.example1(3, 4, 0)
    assert m.is_m_graph() and m.is_strong_m_graph()
    out, _ = rc.totally_real_reduction(m, {"v1": 2})
    assert rc.is_totally_real(m, out)
    pencil, r = rc.find_real_g12(m)
    assert r >= 1 and sum(pencil.values()) == 2
    signature = rc.parity_signature(m, {"v1": 1, "v2": 1})
    assert len(signature) == 4 and sum(signature) == 2, signature

    assert rc.edge_split(rc.random_real_graph(1)).invariants()["isolated_real_edges"] == 0
    assert rc.subdivide(g, 3).invariants()["genus"] == 4

    circle = rc.MetricGraph.from_json(
        json.dumps({"vertices": ["v"], "edges": [{"id": "l", "ends": ["v", "v"], "length": "3/2"}]})
    )
    point = json.dumps([[["vertex", "v"], 1]])
    assert rc.metric_rank(circle, point) == 0
    assert rc.metric_real_rank(circle, point, refine=2) == 0
    assert rc.metric_equivalent(circle, json.dumps([[["vertex", "v"], 2]]), json.dumps([[["edge", "l", "3/4"], 2]]))
    gamma = rc.random_metric_graph(5, profile="strong-m-graph", max_denominator=3)
    assert gamma.is_strong_m_graph()
    _, r = rc.metric_find_real_g12(gamma)
    assert r >= 1

    try:
        rc.example1(2, 5, 0)
    except rc.RealchipError:
        pass
    else:
        raise AssertionError("inadmissible triple accepted")

    summary = rc.fuzz(seed=1, trials=10)
    assert summary["failed"] == 0, summary
    print("pyrealchip smoke test passed")


if __name__ == "__main__":
    main()
