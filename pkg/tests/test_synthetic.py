from __future__ import annotations

from rationale_miner.corpus import enumerate_sentences
from rationale_miner.synthetic import PROJECTS, make_design_corpus

_DESIGN_MARKER = "solution"


def test_corpus_meets_requested_size():
    issues, annotations = make_design_corpus(seed=0, min_sentences=200)
    assert sum(len(a.labels) for a in annotations) >= 200
    assert len(issues) == len(annotations)


def test_corpus_is_seed_deterministic():
    first_issues, first_ann = make_design_corpus(seed=5, min_sentences=60)
    second_issues, second_ann = make_design_corpus(seed=5, min_sentences=60)
    assert first_issues == second_issues
    assert first_ann == second_ann


def test_different_seeds_differ():
    a, _ = make_design_corpus(seed=1, min_sentences=60)
    b, _ = make_design_corpus(seed=2, min_sentences=60)
    assert a != b


def test_labels_align_with_enumerated_sentences():
    issues, annotations = make_design_corpus(seed=3, min_sentences=120)
    for issue, annotation in zip(issues, annotations):
        assert annotation.issue == issue.key
        ids = {s.id for s in enumerate_sentences(issue)}
        assert set(annotation.labels) == ids
        assert annotation.labels["sum-s0"] == "none"
        assert set(annotation.labels.values()) <= {"none", "solution"}


def test_design_sentences_carry_the_solution_keyword():
    issues, annotations = make_design_corpus(seed=7, min_sentences=150)
    for issue, annotation in zip(issues, annotations):
        text_of = {s.id: s.text for s in enumerate_sentences(issue)}
        for sid, label in annotation.labels.items():
            if label == "solution":
                assert _DESIGN_MARKER in text_of[sid].lower()
            else:
                assert _DESIGN_MARKER not in text_of[sid].lower()


def test_corpus_spans_all_three_projects():
    issues, _ = make_design_corpus(seed=0, min_sentences=200)
    assert {i.project for i in issues} == set(PROJECTS)
    # every project has enough issues to survive a train/test split
    for project in PROJECTS:
        assert sum(1 for i in issues if i.project == project) >= 2


def test_design_rate_extremes():
    _, none_ann = make_design_corpus(seed=0, min_sentences=40, design_rate=0.0)
    assert all(label == "none"
               for a in none_ann for label in a.labels.values())
    _, all_ann = make_design_corpus(seed=0, min_sentences=40, design_rate=1.0)
    for record in all_ann:
        for sid, label in record.labels.items():
            assert label == ("none" if sid == "sum-s0" else "solution")
