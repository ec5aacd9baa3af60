"""The mining pipeline: design sentences, pairwise relations, rationale groups.

A mined rationale is one solution group (design sentences that complement each
other) plus zero or more argument groups attached to it through supporting
relations.  Relations come from a model backend queried per sentence pair;
roles and groups are then decided deterministically from the relation graph.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .backends.baseline import BaselineModel, pair_features
from .backends.heads import LogisticHead, SoftmaxHead
from .backends.protocol import Backend
from .corpus import IssueLog, Sentence, clean_issue, enumerate_sentences, sentence_order
from .errors import SameSentence, UnknownSentence, UnparsableResponse
from .features import FEATURE_NAMES, POLARITY_WORDS, compute_feature_matrix
from .prompts import (
    CLOZE_MAX_SEQUENCE,
    PAIR_MAX_SEQUENCE,
    TokenBudget,
    build_cloze_prompt,
    build_pair_prompt,
    parse_relation_label,
)
from .sentiment import SentimentAnalyzer

logger = logging.getLogger(__name__)

SUPPORTING = "supporting"
COMPLEMENTARY = "complementary"
UNRELATED = "unrelated"

SP_FEATURE_NAMES: tuple[str, ...] = tuple(
    f"polarity_{w}" for w in POLARITY_WORDS
) + FEATURE_NAMES


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SupportingEdge:
    argument: str
    solution: str


@dataclass
class RelationGraph:
    """Typed relations over the design sentences of one issue."""

    nodes: list[str]  # design-sentence ids in global order
    order: dict[str, int]  # sentence id -> global index
    supporting: list[SupportingEdge] = field(default_factory=list)
    complementary: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        known = set(self.nodes)
        for edge in self.supporting:
            if edge.argument not in known or edge.solution not in known:
                raise UnknownSentence(f"supporting edge references unknown node: {edge}")
            if edge.argument == edge.solution:
                raise SameSentence(f"supporting edge relates {edge.argument} to itself")
        for a, b in self.complementary:
            if a not in known or b not in known:
                raise UnknownSentence(f"complementary edge references unknown node: {(a, b)}")
            if a == b:
                raise SameSentence(f"complementary edge relates {a} to itself")


@dataclass
class Rationale:
    solution: list[str]
    arguments: list[list[str]]


@dataclass
class ConstructionResult:
    rationales: list[Rationale]
    warnings: list[str] = field(default_factory=list)


class _DisjointSet:
    def __init__(self, items):
        self.parent = {item: item for item in items}
        self.size = {item: 1 for item in items}

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def _assign_roles(graph: RelationGraph) -> dict[str, str]:
    """Role per node: incoming supporting edges make a solution, outgoing an
    argument; conflicts go to the majority side and ties to solution.  Nodes
    without supporting edges are solutions (rationales may lack arguments)."""
    incoming: dict[str, int] = {node: 0 for node in graph.nodes}
    outgoing: dict[str, int] = {node: 0 for node in graph.nodes}
    for edge in graph.supporting:
        outgoing[edge.argument] += 1
        incoming[edge.solution] += 1
    roles = {}
    for node in graph.nodes:
        roles[node] = "argument" if outgoing[node] > incoming[node] else "solution"
    return roles


def _grouped(nodes: list[str], edges: list[tuple[str, str]],
             order: dict[str, int]) -> list[list[str]]:
    dsu = _DisjointSet(nodes)
    for a, b in edges:
        dsu.union(a, b)
    clusters: dict[str, list[str]] = {}
    for node in nodes:
        clusters.setdefault(dsu.find(node), []).append(node)
    groups = [sorted(members, key=order.__getitem__) for members in clusters.values()]
    groups.sort(key=lambda g: order[g[0]])
    return groups


def construct_rationales(graph: RelationGraph) -> ConstructionResult:
    """Deterministically fold a relation graph into its rationales.

    Solution groups are connected components of complementary edges between
    solution-role nodes, and each one yields a rationale.  Argument groups are
    the same construction over argument-role nodes; each attaches to the
    solution group that receives most supporting edges from its members,
    breaking ties toward the group holding the smallest global index.
    Cross-role complementary edges are dropped, as are argument groups whose
    supporting edges all point outside every solution group.
    """
    warnings: list[str] = []
    roles = _assign_roles(graph)
    solution_nodes = [n for n in graph.nodes if roles[n] == "solution"]
    argument_nodes = [n for n in graph.nodes if roles[n] == "argument"]

    usable_comp: dict[str, list[tuple[str, str]]] = {"solution": [], "argument": []}
    for a, b in graph.complementary:
        if roles[a] == roles[b]:
            usable_comp[roles[a]].append((a, b))
        else:
            warnings.append(
                f"complementary edge {a}~{b} crosses roles "
                f"({roles[a]} vs {roles[b]}); ignored"
            )

    solution_groups = _grouped(solution_nodes, usable_comp["solution"], graph.order)
    argument_groups = _grouped(argument_nodes, usable_comp["argument"], graph.order)

    group_of: dict[str, int] = {}
    for gi, group in enumerate(solution_groups):
        for node in group:
            group_of[node] = gi

    attached: list[list[list[str]]] = [[] for _ in solution_groups]
    for group in argument_groups:
        votes = [0] * len(solution_groups)
        for node in group:
            for edge in graph.supporting:
                if edge.argument == node and edge.solution in group_of:
                    votes[group_of[edge.solution]] += 1
        best = max(votes, default=0)
        if best == 0:
            warnings.append(
                f"argument group {group} supports no surviving solution; dropped"
            )
            continue
        tied = [gi for gi, v in enumerate(votes) if v == best]
        target = min(tied, key=lambda gi: graph.order[solution_groups[gi][0]])
        attached[target].append(group)

    rationales = [
        Rationale(solution=group, arguments=attached[gi])
        for gi, group in enumerate(solution_groups)
    ]
    for warning in warnings:
        logger.warning("%s", warning)
    return ConstructionResult(rationales=rationales, warnings=warnings)


@dataclass
class PromptHeadClassifier:
    """Scores sentences through the cloze prompt and a head over the
    43-dimensional polarity + features vector."""

    backend: Backend
    head: LogisticHead
    budget: TokenBudget = TokenBudget(CLOZE_MAX_SEQUENCE)
    workers: int | None = None

    def scores(self, sentences: list[Sentence], features: np.ndarray,
               summary: str) -> np.ndarray:
        prompts = [build_cloze_prompt(s, summary, self.budget) for s in sentences]

        def probe(prompt):
            return self.backend.mask_probs(prompt.text, POLARITY_WORDS)

        with ThreadPoolExecutor(max_workers=self.workers or default_workers()) as pool:
            polarity = list(pool.map(probe, prompts))
        sp = np.hstack([np.asarray(polarity, dtype=np.float64), features])
        return self.head.predict_proba(sp)


@dataclass
class BaselineClassifier:
    model: BaselineModel

    def scores(self, sentences: list[Sentence], features: np.ndarray,
               summary: str) -> np.ndarray:
        return self.model.predict_proba([s.text for s in sentences], features)


def extract_design_sentences(sentences: list[Sentence], features: np.ndarray,
                             summary: str, classifier) -> tuple[list[Sentence], np.ndarray]:
    """Design sentences (score >= 0.5) with the full score vector."""
    if not sentences:
        return [], np.zeros(0)
    scores = np.asarray(classifier.scores(sentences, features, summary))
    selected = [s for s, score in zip(sentences, scores) if score >= 0.5]
    return selected, scores


@dataclass
class PairDecision:
    kind: str  # supporting | complementary
    argument: str | None  # supporting only
    solution: str | None
    pair: tuple[str, str]


def classify_pairs(design: list[Sentence], backend: Backend,
                   budget: TokenBudget = TokenBudget(PAIR_MAX_SEQUENCE),
                   workers: int | None = None,
                   max_tokens: int = 8) -> tuple[list[PairDecision], list[str]]:
    """Relate every unordered design-sentence pair through the backend.

    The earlier sentence is always Sentence 1 in the first query.  A
    supporting answer triggers the reversed query; if both directions claim
    supporting, the direction whose solution has the smaller global index
    wins.  Responses with no label word downgrade the pair to unrelated.
    """
    ordered = sorted(design, key=lambda s: s.global_index)
    pairs = [(a, b) for i, a in enumerate(ordered) for b in ordered[i + 1:]]
    warnings: list[str] = []

    def ask(pair):
        s1, s2 = pair
        prompt = build_pair_prompt(s1, s2, budget)
        return backend.generate(prompt.text, max_tokens=max_tokens)

    with ThreadPoolExecutor(max_workers=workers or default_workers()) as pool:
        forward_raw = list(pool.map(ask, pairs))

    needs_reverse = []
    forward_labels: list[str | None] = []
    for (s1, s2), raw in zip(pairs, forward_raw):
        try:
            label = parse_relation_label(raw)
        except UnparsableResponse:
            warnings.append(
                f"pair {s1.id}/{s2.id}: unparsable response {raw!r}; treated as unrelated"
            )
            forward_labels.append(None)
            continue
        forward_labels.append(label)
        if label == SUPPORTING:
            needs_reverse.append((s2, s1))

    with ThreadPoolExecutor(max_workers=workers or default_workers()) as pool:
        reverse_raw = list(pool.map(ask, needs_reverse))
    reverse_by_pair = {}
    for (s2, s1), raw in zip(needs_reverse, reverse_raw):
        reverse_by_pair[(s1.id, s2.id)] = raw

    decisions: list[PairDecision] = []
    for (s1, s2), label in zip(pairs, forward_labels):
        if label is None or label == UNRELATED:
            continue
        if label == COMPLEMENTARY:
            decisions.append(PairDecision(kind=COMPLEMENTARY, argument=None,
                                          solution=None, pair=(s1.id, s2.id)))
            continue
        raw_reverse = reverse_by_pair[(s1.id, s2.id)]
        try:
            reverse_label = parse_relation_label(raw_reverse)
        except UnparsableResponse:
            warnings.append(
                f"pair {s1.id}/{s2.id}: unparsable reverse response "
                f"{raw_reverse!r}; treated as unrelated"
            )
            continue
        if reverse_label == SUPPORTING:
            # Both directions claim support; keep the one whose solution
            # comes first in the issue.
            decisions.append(PairDecision(kind=SUPPORTING, argument=s2.id,
                                          solution=s1.id, pair=(s1.id, s2.id)))
        else:
            decisions.append(PairDecision(kind=SUPPORTING, argument=s1.id,
                                          solution=s2.id, pair=(s1.id, s2.id)))
    for warning in warnings:
        logger.warning("%s", warning)
    return decisions, warnings


def build_relation_graph(design: list[Sentence],
                         decisions: list[PairDecision]) -> RelationGraph:
    ordered = sorted(design, key=lambda s: s.global_index)
    order = {s.id: s.global_index for s in ordered}
    supporting = [
        SupportingEdge(argument=d.argument, solution=d.solution)
        for d in decisions if d.kind == SUPPORTING
    ]
    complementary = [d.pair for d in decisions if d.kind == COMPLEMENTARY]
    supporting.sort(key=lambda e: (order[e.argument], order[e.solution]))
    complementary.sort(key=lambda p: (order[p[0]], order[p[1]]))
    return RelationGraph(nodes=[s.id for s in ordered], order=order,
                         supporting=supporting, complementary=complementary)


@dataclass
class MineResult:
    issue_key: str
    sentences: list[Sentence]
    scores: np.ndarray
    design_ids: list[str]
    graph: RelationGraph
    rationales: list[Rationale]
    warnings: list[str]

    def to_json(self) -> dict:
        text_of = {s.id: s.text for s in self.sentences}
        index_of = {s.id: i for i, s in enumerate(self.sentences)}
        return {
            "issue": self.issue_key,
            "design_sentences": [
                {"id": sid, "text": text_of[sid],
                 "score": float(self.scores[index_of[sid]])}
                for sid in self.design_ids
            ],
            "relations": {
                "supporting": [
                    {"argument": e.argument, "solution": e.solution}
                    for e in self.graph.supporting
                ],
                "complementary": [list(pair) for pair in self.graph.complementary],
            },
            "rationales": [
                {"solution": r.solution, "arguments": r.arguments}
                for r in self.rationales
            ],
            "warnings": self.warnings,
        }

    def to_markdown(self) -> str:
        return render_markdown(
            self.issue_key,
            [{"solution": r.solution, "arguments": r.arguments} for r in self.rationales],
            {s.id: s.text for s in self.sentences},
        )


def render_markdown(issue_key: str, rationales: list[dict],
                    text_of: dict[str, str]) -> str:
    """Human-readable summary of mined rationales; ids resolve through
    ``text_of`` and fall back to the bare id."""
    lines = [f"# Design rationales: {issue_key}", ""]
    if not rationales:
        lines.extend(["No rationales mined.", ""])
    for i, rationale in enumerate(rationales, start=1):
        lines.extend([f"## Rationale {i}", "", "Solution:"])
        lines.extend(f"- [{sid}] {text_of.get(sid, '')}".rstrip()
                     for sid in rationale["solution"])
        lines.append("")
        if rationale["arguments"]:
            lines.append("Arguments:")
            for gi, group in enumerate(rationale["arguments"], start=1):
                lines.append(f"- group {gi}:")
                lines.extend(f"  - [{sid}] {text_of.get(sid, '')}".rstrip()
                             for sid in group)
            lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def find_sentence(sentences: list[Sentence], sentence_id: str) -> Sentence:
    for sentence in sentences:
        if sentence.id == sentence_id:
            return sentence
    raise UnknownSentence(f"no sentence with id {sentence_id!r} in this issue")


def mine_issue(issue: IssueLog, classifier, backend: Backend,
               cloze_budget: TokenBudget = TokenBudget(CLOZE_MAX_SEQUENCE),
               pair_budget: TokenBudget = TokenBudget(PAIR_MAX_SEQUENCE),
               analyzer: SentimentAnalyzer | None = None,
               workers: int | None = None,
               already_clean: bool = False) -> MineResult:
    """Run the whole pipeline for one parsed issue."""
    if not already_clean:
        issue = clean_issue(issue)
    sentences, matrix = compute_feature_matrix(issue, analyzer)
    design, scores = extract_design_sentences(
        sentences, matrix, issue.summary, classifier)
    decisions, pair_warnings = ([], [])
    if len(design) >= 2:
        decisions, pair_warnings = classify_pairs(
            design, backend, pair_budget, workers=workers)
    graph = build_relation_graph(design, decisions)
    construction = construct_rationales(graph)
    return MineResult(
        issue_key=issue.key,
        sentences=sentences,
        scores=scores,
        design_ids=[s.id for s in sorted(design, key=lambda s: s.global_index)],
        graph=graph,
        rationales=construction.rationales,
        warnings=pair_warnings + construction.warnings,
    )
