from collections import Counter

from faultgraph.graphs import (
    COMPOSITION,
    DEPENDENCE,
    INHERITANCE,
    build_class_graph,
    build_cu_graph,
)
from faultgraph.javaparse import parse_compilation_unit, parse_corpus_dir
from faultgraph.resolve import resolve_type_references


def graph_for(*sources):
    rc = resolve_type_references(
        [parse_compilation_unit(text, path) for path, text in sources]
    )
    cg = build_class_graph(rc)
    return rc, cg


def test_extends_produces_inheritance_edge():
    _, cg = graph_for(
        ("p/A.java", "package p;\nclass A extends B {\n void m() {}\n}\n"),
        ("p/B.java", "package p;\nclass B {\n void m() {}\n}\n"),
    )
    assert (("p/A.java", "A"), ("p/B.java", "B"), INHERITANCE) in cg.edges


def test_composition_and_dependence_are_distinct_kinds():
    _, cg = graph_for(
        (
            "p/A.java",
            "package p;\nclass A {\n    C c;\n    void m() {\n        c.go();\n    }\n}\n",
        ),
        ("p/C.java", "package p;\nclass C {\n void go() {}\n}\n"),
    )
    a, c = ("p/A.java", "A"), ("p/C.java", "C")
    assert (a, c, COMPOSITION) in cg.edges
    assert (a, c, DEPENDENCE) in cg.edges


def test_external_only_references_leave_node_isolated():
    _, cg = graph_for(
        (
            "p/A.java",
            "package p;\nimport java.util.List;\nclass A {\n    List xs;\n    void m() {\n        xs.add(1);\n    }\n}\n",
        ),
    )
    assert cg.nodes == {("p/A.java", "A")}
    assert cg.edges == frozenset()


def test_interface_constants_contribute_no_composition():
    _, cg = graph_for(
        ("p/I.java", "package p;\ninterface I {\n    B LIMIT = null;\n}\n"),
        ("p/B.java", "package p;\nclass B {\n void m() {}\n}\n"),
    )
    assert all(kind != COMPOSITION for _, _, kind in cg.edges)


def test_no_self_edges():
    _, cg = graph_for(
        (
            "p/A.java",
            "package p;\nclass A {\n    A next;\n    void m() {\n        next.m();\n    }\n}\n",
        ),
    )
    assert cg.edges == frozenset()


def test_intra_cu_relationship_produces_no_cu_edge():
    rc, cg = graph_for(
        (
            "p/Pair.java",
            "package p;\nclass A {\n    B b;\n    void m() {\n        b.go();\n    }\n}\n"
            "class B {\n    void go() {\n        new A();\n    }\n}\n",
        ),
    )
    assert len(cg.edges) > 0
    cug = build_cu_graph(cg, rc)
    assert cug.weights == {}


def test_two_classes_each_depending_on_one_gives_weight_two():
    rc, cg = graph_for(
        (
            "p/P.java",
            "package p;\nclass A {\n    void m(Q q) {\n        q.go();\n    }\n}\n"
            "class B {\n    void n(Q q) {\n        q.go();\n    }\n}\n",
        ),
        ("p/Q.java", "package p;\nclass Q {\n    void go() {}\n}\n"),
    )
    cug = build_cu_graph(cg, rc)
    assert cug.weights == {("p/P.java", "p/Q.java", DEPENDENCE): 2}


def test_inheritance_only_link_keeps_its_kind():
    rc, cg = graph_for(
        ("p/P.java", "package p;\nclass P extends Q {\n void m() {}\n}\n"),
        ("p/Q.java", "package p;\npublic class Q {\n void m() {}\n}\n"),
    )
    cug = build_cu_graph(cg, rc)
    assert cug.weights == {("p/P.java", "p/Q.java", INHERITANCE): 1}


def test_fixture_class_graph_matches_hand_oracle(corpus_r1_dir):
    facts, _ = parse_corpus_dir(corpus_r1_dir)
    rc = resolve_type_references(facts)
    cg = build_class_graph(rc)
    alpha = ("app/Alpha.java", "Alpha")
    base = ("app/Base.java", "Base")
    runner = ("app/Runner.java", "Runner")
    report = ("app/Report.java", "Report")
    util = ("lib/Util.java", "Util")
    text = ("lib/Util.java", "Text")
    sink = ("lib/Sink.java", "Sink")
    assert cg.edges == {
        (alpha, base, INHERITANCE),
        (alpha, runner, INHERITANCE),
        (alpha, util, COMPOSITION),
        (alpha, util, DEPENDENCE),
        (report, util, COMPOSITION),
        (report, util, DEPENDENCE),
        (report, sink, DEPENDENCE),
        (util, text, DEPENDENCE),
    }


def test_fixture_cu_graph_matches_hand_oracle(corpus_r1_dir):
    facts, _ = parse_corpus_dir(corpus_r1_dir)
    rc = resolve_type_references(facts)
    cug = build_cu_graph(build_class_graph(rc), rc)
    assert cug.weights == {
        ("app/Alpha.java", "app/Base.java", INHERITANCE): 1,
        ("app/Alpha.java", "app/Runner.java", INHERITANCE): 1,
        ("app/Alpha.java", "lib/Util.java", COMPOSITION): 1,
        ("app/Alpha.java", "lib/Util.java", DEPENDENCE): 1,
        ("app/Report.java", "lib/Util.java", COMPOSITION): 1,
        ("app/Report.java", "lib/Util.java", DEPENDENCE): 1,
        ("app/Report.java", "lib/Sink.java", DEPENDENCE): 1,
    }


def test_cu_weights_reproduce_brute_force_class_edge_counts(corpus_r1_dir, corpus_r2_dir):
    for directory in (corpus_r1_dir, corpus_r2_dir):
        facts, _ = parse_corpus_dir(directory)
        rc = resolve_type_references(facts)
        cg = build_class_graph(rc)
        cug = build_cu_graph(cg, rc)
        brute = Counter()
        for (sp, _), (tp, _), kind in cg.edges:
            if sp != tp:
                brute[(sp, tp, kind)] += 1
        assert dict(brute) == cug.weights
