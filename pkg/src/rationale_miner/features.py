"""Handcrafted per-sentence features for design-text extraction.

Every sentence maps to a fixed 29-dimensional vector laid out as five blocks:
process (5), position (3), keyword (14), structure (3), sentiment (4).  The
order is frozen in FEATURE_NAMES; trained heads store a fingerprint of it and
refuse to run against a different layout.
"""

from __future__ import annotations

import re

import numpy as np

from .corpus import CODE_PLACEHOLDER, URL_PLACEHOLDER, IssueLog, Sentence, enumerate_sentences
from .sentiment import SentimentAnalyzer

# Candidate fillers for the cloze prompt, probed in this order.  The first
# seven signal relatedness, the last seven signal the opposite.
POLARITY_WORDS: tuple[str, ...] = (
    "surely", "directly", "closely", "certainly", "strongly", "highly", "absolutely",
    "not", "un", "never", "no", "little", "hardly", "rarely",
)

INTERROGATIVES: tuple[str, ...] = ("what", "why", "when", "who", "which", "how")
MODAL_GROUPS: tuple[tuple[str, ...], ...] = (
    ("should", "shall"), ("can", "could"), ("may", "might"),
)
GREETING_WORDS: tuple[str, ...] = ("hi", "hello", "bye", "thanks", "thx", "thank")
CAUSAL_WORDS: tuple[str, ...] = ("so", "therefore", "then")
TRANSITION_WORDS: tuple[str, ...] = ("but", "yet", "however")

FEATURE_NAMES: tuple[str, ...] = (
    "is_description", "is_creator", "author_comment_count", "comment_count",
    "sentence_count",
    "comment_position", "sentence_position", "global_index",
    "kw_what", "kw_why", "kw_when", "kw_who", "kw_which", "kw_how",
    "kw_modal_should_shall", "kw_modal_can_could", "kw_modal_may_might",
    "kw_question_mark", "kw_exclamation_mark", "kw_greeting", "kw_causal",
    "kw_transition",
    "has_code", "has_url", "word_count",
    "sentiment_pos", "sentiment_neu", "sentiment_neg", "sentiment_compound",
)

FEATURE_DIM = len(FEATURE_NAMES)

# Contiguous slots of each block, used by the ablation runner.
FEATURE_GROUPS: dict[str, tuple[int, int]] = {
    "process": (0, 5),
    "position": (5, 8),
    "keyword": (8, 22),
    "structure": (22, 25),
    "sentiment": (25, 29),
}

_WORD = re.compile(r"[A-Za-z0-9']+")


def word_tokens(text: str) -> list[str]:
    """Lowercased word tokens; keyword flags match these exactly, never substrings."""
    return _WORD.findall(text.lower())


def keyword_flags(text: str) -> list[float]:
    """The 14 keyword-block flags for a piece of text, in feature order."""
    tokens = set(word_tokens(text))
    flags = [1.0 if w in tokens else 0.0 for w in INTERROGATIVES]
    flags.extend(1.0 if any(m in tokens for m in group) else 0.0
                 for group in MODAL_GROUPS)
    flags.append(1.0 if "?" in text else 0.0)
    flags.append(1.0 if "!" in text else 0.0)
    flags.append(1.0 if any(w in tokens for w in GREETING_WORDS) else 0.0)
    flags.append(1.0 if any(w in tokens for w in CAUSAL_WORDS) else 0.0)
    flags.append(1.0 if any(w in tokens for w in TRANSITION_WORDS) else 0.0)
    return flags


def compute_features(sentence: Sentence, issue: IssueLog,
                     all_sentences: list[Sentence] | None = None,
                     analyzer: SentimentAnalyzer | None = None) -> np.ndarray:
    """Compute the 29-dimensional feature vector for one sentence.

    ``all_sentences`` is the full enumeration of the issue; passing it in
    avoids re-segmenting the issue per sentence.  The summary counts as part
    of the description side for the is_description flag, and summary or
    description sentences take comment_position 0.
    """
    if all_sentences is None:
        all_sentences = enumerate_sentences(issue)
    if analyzer is None:
        analyzer = SentimentAnalyzer()

    comment_count = len(issue.comments)
    author_comment_count = sum(1 for c in issue.comments if c.author == sentence.author)
    block = [s for s in all_sentences
             if s.kind == sentence.kind and s.comment_index == sentence.comment_index]
    if sentence.kind == "comment":
        comment_position = (sentence.comment_index + 1) / comment_count
    else:
        comment_position = 0.0
    sentence_position = (sentence.block_index + 1) / len(block)

    values = [
        1.0 if sentence.kind in ("summary", "description") else 0.0,
        1.0 if issue.reporter and sentence.author == issue.reporter else 0.0,
        float(author_comment_count),
        float(comment_count),
        float(len(all_sentences)),
        comment_position,
        sentence_position,
        float(sentence.global_index),
    ]
    values.extend(keyword_flags(sentence.text))
    values.append(1.0 if CODE_PLACEHOLDER in sentence.text else 0.0)
    values.append(1.0 if URL_PLACEHOLDER in sentence.text else 0.0)
    values.append(float(len(sentence.text.split())))
    scores = analyzer.scores(sentence.text)
    values.extend([scores.pos, scores.neu, scores.neg, scores.compound])

    vector = np.asarray(values, dtype=np.float64)
    assert vector.shape == (FEATURE_DIM,)
    return vector


def compute_feature_matrix(issue: IssueLog,
                           analyzer: SentimentAnalyzer | None = None
                           ) -> tuple[list[Sentence], np.ndarray]:
    """Feature vectors for every sentence of a cleaned issue, in issue order."""
    if analyzer is None:
        analyzer = SentimentAnalyzer()
    sentences = enumerate_sentences(issue)
    if not sentences:
        return [], np.zeros((0, FEATURE_DIM))
    matrix = np.stack([
        compute_features(s, issue, sentences, analyzer) for s in sentences
    ])
    return sentences, matrix
