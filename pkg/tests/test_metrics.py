import pytest

from faultgraph.errors import UnknownMetric
from faultgraph.facts import ClassFacts, CUFacts, MethodFacts
from faultgraph.graphs import build_class_graph, build_cu_graph
from faultgraph.javaparse import parse_compilation_unit, parse_corpus_dir
from faultgraph.metrics import (
    METRIC_NAMES,
    MetricVector,
    compute_metrics,
    metric_value,
)
from faultgraph.resolve import resolve_type_references


def analyzed(*sources):
    rc = resolve_type_references(
        [parse_compilation_unit(text, path) for path, text in sources]
    )
    cg = build_class_graph(rc)
    cug = build_cu_graph(cg, rc)
    per_class, per_cu = compute_metrics(rc, cg, cug)
    return rc, cg, cug, per_class, per_cu


def test_three_methods_no_fields_no_calls():
    _, cg, _, per_class, _ = analyzed(
        ("p/A.java", "package p;\nclass A {\n void a() {}\n void b() {}\n void c() {}\n}\n"),
    )
    m = per_class[("p/A.java", "A")]
    assert (m.wmc, m.rfc, m.lcom, m.cbo) == (3, 3, 3, 0)


def test_two_methods_sharing_a_field_floor_at_zero():
    _, _, _, per_class, _ = analyzed(
        (
            "p/A.java",
            "package p;\nclass A {\n    int x;\n    void a() {\n        x = 1;\n    }\n"
            "    void b() {\n        x = 2;\n    }\n}\n",
        ),
    )
    assert per_class[("p/A.java", "A")].lcom == 0  # max(0, 0 - 1)


def test_cbo_counts_field_coupled_classes():
    _, _, _, per_class, _ = analyzed(
        ("p/A.java", "package p;\nclass A {\n    B b;\n    C c;\n    void m() {}\n}\n"),
        ("p/B.java", "package p;\nclass B {\n void m() {}\n}\n"),
        ("p/C.java", "package p;\nclass C {\n void m() {}\n}\n"),
    )
    assert per_class[("p/A.java", "A")].cbo == 2


def test_cbo_excludes_inheritance():
    _, _, _, per_class, _ = analyzed(
        ("p/A.java", "package p;\nclass A extends B {\n void m() {}\n}\n"),
        ("p/B.java", "package p;\nclass B {\n void m() {}\n}\n"),
    )
    assert per_class[("p/A.java", "A")].cbo == 0


def test_rfc_counts_distinct_external_call_pairs():
    _, _, _, per_class, _ = analyzed(
        (
            "p/A.java",
            "package p;\nclass A {\n    B b;\n    void m() {\n        b.go();\n        b.go();\n        b.stop();\n    }\n"
            "    void n() {\n        b.go();\n    }\n}\n",
        ),
        ("p/B.java", "package p;\nclass B {\n void go() {}\n void stop() {}\n}\n"),
    )
    # 2 methods + pairs {(B,go),(B,stop)}
    assert per_class[("p/A.java", "A")].rfc == 4


def test_isolated_cu_vector():
    _, _, _, _, per_cu = analyzed(
        ("p/A.java", "package p;\nclass A {\n void a() {}\n void b() {}\n void c() {}\n void d() {}\n void e() {}\n}\n"),
    )
    v = per_cu["p/A.java"]
    assert v.in_links == 0 and v.out_links == 0
    assert v.cu_wmc == 5
    assert v.cu_cbo == 0 and v.cu_rfc == 0


def test_cu_wmc_sums_contained_classes():
    _, _, _, _, per_cu = analyzed(
        (
            "p/P.java",
            "package p;\nclass A {\n void a() {}\n void b() {}\n void c() {}\n}\n"
            "class B {\n void a() {}\n void b() {}\n void c() {}\n void d() {}\n}\n",
        ),
    )
    assert per_cu["p/P.java"].cu_wmc == 7


def test_out_links_cbo_rfc_example():
    # out-edges: dependence weight 2 to Q, inheritance weight 1 to R
    _, _, _, _, per_cu = analyzed(
        (
            "p/P.java",
            "package p;\nclass A extends R {\n    void m(Q q) {\n        q.go();\n    }\n}\n"
            "class B {\n    void n(Q q) {\n        q.stop();\n    }\n}\n",
        ),
        ("p/Q.java", "package p;\nclass Q {\n void go() {}\n void stop() {}\n}\n"),
        ("p/R.java", "package p;\nclass R {\n void r() {}\n}\n"),
    )
    v = per_cu["p/P.java"]
    assert v.out_links == 2
    assert v.cu_cbo == 1
    assert v.cu_rfc == 3


FIXTURE_CLASS_METRICS = {
    ("app/Alpha.java", "Alpha"): (2, 1, 3, 0, 10),
    ("app/Base.java", "Base"): (1, 0, 2, 0, 6),
    ("app/Runner.java", "Runner"): (1, 0, 1, 0, 3),
    ("app/Report.java", "Report"): (2, 2, 5, 1, 10),
    ("lib/Util.java", "Util"): (3, 1, 4, 1, 12),
    ("lib/Util.java", "Text"): (1, 0, 1, 0, 5),
    ("lib/Sink.java", "Sink"): (2, 0, 2, 1, 4),
}

FIXTURE_CU_METRICS = {
    "app/Alpha.java": MetricVector(0, 3, 10, 1, 4, 2, 0),
    "app/Base.java": MetricVector(1, 0, 6, 0, 0, 1, 0),
    "app/Runner.java": MetricVector(1, 0, 3, 0, 0, 1, 0),
    "app/Report.java": MetricVector(0, 2, 10, 2, 3, 2, 1),
    "lib/Util.java": MetricVector(2, 0, 17, 0, 0, 4, 1),
    "lib/Sink.java": MetricVector(1, 0, 4, 0, 0, 2, 1),
}


def fixture_metrics(corpus_dir):
    facts, failures = parse_corpus_dir(corpus_dir)
    assert failures == []
    rc = resolve_type_references(facts)
    cg = build_class_graph(rc)
    cug = build_cu_graph(cg, rc)
    return compute_metrics(rc, cg, cug)


def test_fixture_class_metrics_match_hand_table(corpus_r1_dir):
    per_class, _ = fixture_metrics(corpus_r1_dir)
    got = {cid: (m.wmc, m.cbo, m.rfc, m.lcom, m.loc) for cid, m in per_class.items()}
    assert got == FIXTURE_CLASS_METRICS


def test_fixture_cu_metrics_match_hand_table(corpus_r1_dir):
    _, per_cu = fixture_metrics(corpus_r1_dir)
    assert per_cu == FIXTURE_CU_METRICS


def test_handshake_identity(corpus_r1_dir, corpus_r2_dir):
    for directory in (corpus_r1_dir, corpus_r2_dir):
        _, per_cu = fixture_metrics(directory)
        assert sum(v.in_links for v in per_cu.values()) == sum(
            v.out_links for v in per_cu.values()
        )


def test_cu_cbo_never_exceeds_out_links(corpus_r1_dir, corpus_r2_dir):
    for directory in (corpus_r1_dir, corpus_r2_dir):
        _, per_cu = fixture_metrics(directory)
        for v in per_cu.values():
            assert v.cu_cbo <= v.out_links


def test_aggregation_linearity_under_cu_split():
    method = MethodFacts(name="m")
    cls = lambda name: ClassFacts(name=name, kind="class", methods=(method,), loc=3)
    together = [CUFacts(path="p/Both.java", package="p", classes=(cls("A"), cls("B")), loc=7)]
    split = [
        CUFacts(path="p/A.java", package="p", classes=(cls("A"),), loc=4),
        CUFacts(path="p/B.java", package="p", classes=(cls("B"),), loc=4),
    ]

    def totals(cus):
        rc = resolve_type_references(cus)
        cg = build_class_graph(rc)
        cug = build_cu_graph(cg, rc)
        _, per_cu = compute_metrics(rc, cg, cug)
        return (
            sum(v.cu_wmc for v in per_cu.values()),
            sum(v.cu_lcom for v in per_cu.values()),
            sum(v.cu_loc for v in per_cu.values()),
        )

    assert totals(together) == totals(split)


def test_metric_value_accessor():
    v = MetricVector(1, 2, 3, 4, 5, 6, 7)
    assert [metric_value(v, name) for name in METRIC_NAMES] == [1, 2, 3, 4, 5, 6, 7]
    with pytest.raises(UnknownMetric):
        metric_value(v, "dit")
