"""Issue-log corpus handling: parsing exports, cleaning text, sentence splitting.

An issue export is one JSON object per file with the shape::

    {"key": "FLINK-1320", "summary": "...", "description": "...",
     "reporter": "alice",
     "comments": [{"author": "bob", "body": "...", "created": "2014-01-08T10:22:31.000+0000"}]}

The pipeline is parse_issue -> clean_issue -> enumerate_sentences.  Cleaning
strips quoted material, flattens code blocks and URLs to placeholder tokens,
drops characters outside the configured encoding, and removes bot comments.
"""

from __future__ import annotations

import datetime as _dt
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import BadTimestamp, MalformedExport

DEFAULT_ABBREVIATIONS: tuple[str, ...] = (
    "e.g.", "i.e.", "etc.", "cf.", "vs.", "al.",
    "mr.", "mrs.", "ms.", "dr.", "prof.", "fig.", "approx.",
)

# Comments whose author id contains one of these substrings (case-insensitive)
# are dropped before sentence enumeration.
DEFAULT_BOT_AUTHORS: tuple[str, ...] = ("bot",)

CODE_PLACEHOLDER = "[code]"
URL_PLACEHOLDER = "[URL]"


@dataclass
class Comment:
    author: str
    body: str
    created: _dt.datetime


@dataclass
class IssueLog:
    key: str
    summary: str
    description: str
    reporter: str
    comments: list[Comment] = field(default_factory=list)

    @property
    def project(self) -> str:
        """Project id, taken as the issue-key prefix before the last dash."""
        return self.key.rsplit("-", 1)[0]


@dataclass(frozen=True)
class Sentence:
    """One sentence of an issue, addressable by a stable id.

    Ids follow the block they came from: ``sum-s0`` for the summary,
    ``des-s{k}`` for description sentences, ``c{k}-s{j}`` for sentence j of
    comment k.  ``global_index`` counts sentences over the whole issue in
    summary, description, comment order.
    """

    id: str
    text: str
    kind: str  # "summary" | "description" | "comment"
    comment_index: int | None
    block_index: int
    global_index: int
    author: str
    issue_key: str


def _parse_timestamp(value: str) -> _dt.datetime:
    """Parse an ISO-8601 timestamp, tolerating 'Z' and '+0000' style offsets."""
    if not isinstance(value, str) or not value.strip():
        raise BadTimestamp(f"timestamp is not a string: {value!r}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    # Jira writes numeric offsets without a colon (e.g. +0000).
    text = re.sub(r"([+-]\d{2})(\d{2})$", r"\1:\2", text)
    try:
        return _dt.datetime.fromisoformat(text)
    except ValueError as exc:
        raise BadTimestamp(f"unparseable timestamp: {value!r}") from exc


def parse_issue(raw: dict) -> IssueLog:
    """Build an IssueLog from a decoded export, sorting comments by timestamp.

    Raises MalformedExport when required keys are missing or mistyped and
    BadTimestamp when a comment timestamp cannot be parsed.
    """
    if not isinstance(raw, dict):
        raise MalformedExport(f"issue export must be an object, got {type(raw).__name__}")
    for required in ("key", "summary"):
        if not isinstance(raw.get(required), str) or not raw.get(required):
            raise MalformedExport(f"issue export missing required field {required!r}")
    description = raw.get("description") or ""
    if not isinstance(description, str):
        raise MalformedExport("field 'description' must be a string")
    reporter = raw.get("reporter") or ""
    if not isinstance(reporter, str):
        raise MalformedExport("field 'reporter' must be a string")
    raw_comments = raw.get("comments", [])
    if not isinstance(raw_comments, list):
        raise MalformedExport("field 'comments' must be a list")
    comments = []
    for pos, entry in enumerate(raw_comments):
        if not isinstance(entry, dict):
            raise MalformedExport(f"comment {pos} must be an object")
        for required in ("author", "body", "created"):
            if required not in entry:
                raise MalformedExport(f"comment {pos} missing field {required!r}")
        if not isinstance(entry["author"], str) or not isinstance(entry["body"], str):
            raise MalformedExport(f"comment {pos} has non-string author or body")
        comments.append(
            Comment(author=entry["author"], body=entry["body"],
                    created=_parse_timestamp(entry["created"]))
        )
    comments.sort(key=lambda c: c.created)
    return IssueLog(key=raw["key"], summary=raw["summary"], description=description,
                    reporter=reporter, comments=comments)


def load_corpus(path: str | Path) -> list[IssueLog]:
    """Parse every ``*.json`` file under ``path`` (sorted by name) as an issue."""
    root = Path(path)
    issues = []
    for file in sorted(root.glob("*.json")):
        with open(file, encoding="utf-8") as handle:
            issues.append(parse_issue(json.load(handle)))
    return issues


_QUOTE_BLOCK = re.compile(r"\{quote\}.*?\{quote\}", re.S)
_QUOTE_MARK = re.compile(r"\{quote\}")
_CODE_BLOCKS = (
    re.compile(r"\{code[^}\n]*\}.*?\{code\}", re.S),
    re.compile(r"\{noformat\}.*?\{noformat\}", re.S),
    re.compile(r"```.*?```", re.S),
)
# Unterminated openers swallow the rest of the text.
_CODE_TAILS = (
    re.compile(r"\{code[^}\n]*\}.*\Z", re.S),
    re.compile(r"\{noformat\}.*\Z", re.S),
    re.compile(r"```.*\Z", re.S),
)
_URL = re.compile(r"(?:https?|ftp)://\S+")
_URL_TRAILING = ".,;:!?)]}\"'"


def _replace_url(match: re.Match) -> str:
    # Keep trailing punctuation out of the placeholder so sentence
    # terminators survive cleaning.
    body = match.group(0)
    tail = ""
    while body and body[-1] in _URL_TRAILING:
        tail = body[-1] + tail
        body = body[:-1]
    return URL_PLACEHOLDER + tail


def clean_text(text: str, encoding: str = "ascii") -> str:
    """Normalize markup: re-encode, delete quotes, replace code and URLs.

    The encoding filter runs first so markup patterns see the text they will
    leave behind; every replacement token is plain ASCII.  Applied in a fixed
    order (encoding filter, quotes, quoted lines, code, URLs) so that quoted
    code is simply deleted and URLs inside code vanish with the block.  The
    function is idempotent.
    """
    text = text.encode(encoding, errors="ignore").decode(encoding)
    text = _QUOTE_BLOCK.sub("", text)
    text = _QUOTE_MARK.sub("", text)
    lines = [line for line in text.split("\n") if not line.lstrip().startswith(">")]
    text = "\n".join(lines)
    for pattern in _CODE_BLOCKS:
        text = pattern.sub(CODE_PLACEHOLDER, text)
    for pattern in _CODE_TAILS:
        text = pattern.sub(CODE_PLACEHOLDER, text)
    return _URL.sub(_replace_url, text)


def clean_issue(issue: IssueLog, encoding: str = "ascii",
                bot_authors: tuple[str, ...] = DEFAULT_BOT_AUTHORS) -> IssueLog:
    """Return a cleaned copy of ``issue`` with bot comments removed.

    A comment is a bot comment when its author id contains any entry of
    ``bot_authors`` case-insensitively.  Remaining comments keep their order,
    so comment indices are dense after the drop.
    """
    patterns = tuple(p.lower() for p in bot_authors)

    def is_bot(author: str) -> bool:
        lowered = author.lower()
        return any(p in lowered for p in patterns)

    comments = [
        replace(c, body=clean_text(c.body, encoding))
        for c in issue.comments if not is_bot(c.author)
    ]
    return replace(
        issue,
        summary=clean_text(issue.summary, encoding),
        description=clean_text(issue.description, encoding),
        comments=comments,
    )


_TERMINATOR = re.compile(r"[.!?]+(?=\s|$)")
_PARAGRAPH = re.compile(r"\n\s*\n")
_TOKEN_LEAD = "([{\"'"


def _split_flat(flat: str, abbreviations: frozenset[str]) -> list[str]:
    pieces = []
    start = 0
    for match in _TERMINATOR.finditer(flat):
        end = match.end()
        candidate = flat[start:end].strip()
        if not candidate:
            start = end
            continue
        last_token = candidate.rsplit(" ", 1)[-1].lstrip(_TOKEN_LEAD)
        if last_token.lower() in abbreviations:
            continue
        pieces.append(candidate)
        start = end
    tail = flat[start:].strip()
    if tail:
        pieces.append(tail)
    return pieces


def split_sentences(text: str,
                    abbreviations: tuple[str, ...] = DEFAULT_ABBREVIATIONS) -> list[str]:
    """Split prose into sentences.

    Boundaries are runs of ``.!?`` followed by whitespace or end of text,
    unless the token carrying the terminator is a known abbreviation.  Blank
    lines always end a sentence; single newlines behave like spaces.  Internal
    whitespace is collapsed and an unterminated trailing fragment still counts
    as a sentence.
    """
    known = frozenset(a.lower() for a in abbreviations)
    sentences = []
    for paragraph in _PARAGRAPH.split(text):
        flat = " ".join(paragraph.split())
        if flat:
            sentences.extend(_split_flat(flat, known))
    return sentences


def enumerate_sentences(issue: IssueLog,
                        abbreviations: tuple[str, ...] = DEFAULT_ABBREVIATIONS) -> list[Sentence]:
    """List every sentence of a (cleaned) issue in stable order with stable ids.

    The summary is never segmented: it contributes exactly one sentence when
    non-empty.  Description and comment bodies are segmented with
    ``split_sentences``.
    """
    sentences: list[Sentence] = []

    def push(sid: str, text: str, kind: str, comment_index: int | None,
             block_index: int, author: str) -> None:
        sentences.append(Sentence(
            id=sid, text=text, kind=kind, comment_index=comment_index,
            block_index=block_index, global_index=len(sentences),
            author=author, issue_key=issue.key,
        ))

    summary = " ".join(issue.summary.split())
    if summary:
        push("sum-s0", summary, "summary", None, 0, issue.reporter)
    for j, text in enumerate(split_sentences(issue.description, abbreviations)):
        push(f"des-s{j}", text, "description", None, j, issue.reporter)
    for k, comment in enumerate(issue.comments):
        for j, text in enumerate(split_sentences(comment.body, abbreviations)):
            push(f"c{k}-s{j}", text, "comment", k, j, comment.author)
    return sentences


def sentence_order(sentences: list[Sentence]) -> dict[str, int]:
    """Map sentence id to global index, the tie-break order used downstream."""
    return {s.id: s.global_index for s in sentences}
