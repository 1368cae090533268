"""Prior acquisition: object sizes, contact maps, label normalization, votes."""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from importlib import resources

from ..errors import (
    InvalidInputError,
    NormalizationError,
    PriorParseError,
    SizeSanityError,
)
from .client import CompletionClient
from .prompts import (
    CONTACTS_TEMPLATE,
    LABEL_MAP_TEMPLATE,
    SIZE_TEMPLATE,
    render_contacts_prompt,
    render_label_map_prompt,
    render_size_prompt,
)

log = logging.getLogger(__name__)

SIZE_BAND = (0.01, 10.0)
_SIZE_RE = re.compile(r"(\d+(?:\.\d+)?)\s*m\b")


@dataclass(frozen=True)
class SizePrior:
    category: str
    size: float  # meters, longest axis

    def __post_init__(self):
        if not (SIZE_BAND[0] <= self.size <= SIZE_BAND[1]):
            raise SizeSanityError(
                f"size {self.size} m for {self.category!r} outside {SIZE_BAND}"
            )


@dataclass(frozen=True)
class InteractionMap:
    action: str
    object_category: str
    pairs: tuple[tuple[str, str], ...]  # (object part, body part)

    def pair_set(self) -> set[tuple[str, str]]:
        return set(self.pairs)


def parse_size_response(text: str) -> float:
    m = _SIZE_RE.search(text)
    if not m:
        raise PriorParseError("no decimal followed by 'm' in completion", raw_text=text)
    return float(m.group(1))


def query_object_size(category: str, client: CompletionClient) -> SizePrior:
    """Size in meters for a category, parsed from the cloze completion."""
    category = category.strip().lower()
    prompt = render_size_prompt(category)
    response = client.complete(prompt, SIZE_TEMPLATE)
    return SizePrior(category, parse_size_response(response))


def parse_contacts_response(text: str) -> tuple[tuple[str, str], ...]:
    """Comma-separated `objectpart/bodypart` tokens, order preserving."""
    body = text.strip()
    for stopper in ("\n\n", "\nAction:"):
        cut = body.find(stopper)
        if cut >= 0:
            body = body[:cut]
    body = body.replace("\n", " ")
    pairs = []
    for token in body.split(","):
        token = token.strip()
        if not token or "/" not in token:
            continue
        obj_part, _, body_part = token.partition("/")
        obj_part, body_part = obj_part.strip(), body_part.strip()
        if obj_part and body_part:
            pairs.append((obj_part, body_part))
    if not pairs:
        raise PriorParseError("no objectpart/bodypart tokens in completion", raw_text=text)
    return tuple(pairs)


def query_contacts(action: str, category: str, client: CompletionClient) -> InteractionMap:
    """Action-conditioned contact pairs, parsed from the few-shot completion."""
    action = action.strip().lower()
    category = category.strip().lower()
    prompt = render_contacts_prompt(action, category)
    response = client.complete(prompt, CONTACTS_TEMPLATE)
    return InteractionMap(action, category, parse_contacts_response(response))


def load_synonym_tables() -> dict:
    ref = resources.files("hoifit").joinpath("data/synonyms.json")
    return json.loads(ref.read_text())


def _normalize_one(raw: str, vocab: list[str], synonyms: dict[str, list[str]],
                   client: CompletionClient | None) -> list[str]:
    """Map one free-text part to vocabulary labels; [] when unmappable."""
    text = raw.strip().lower()
    vocab_by_lower = {v.lower(): v for v in vocab}
    if text in vocab_by_lower:
        return [vocab_by_lower[text]]
    if text in synonyms:
        hits = [vocab_by_lower[s.lower()] for s in synonyms[text] if s.lower() in vocab_by_lower]
        if hits:
            return hits
    if client is not None:
        response = client.complete(render_label_map_prompt(text, sorted(vocab)), LABEL_MAP_TEMPLATE)
        answer = response.strip().splitlines()[0].strip().lower() if response.strip() else ""
        if answer in vocab_by_lower:
            return [vocab_by_lower[answer]]
    return []


def normalize_part_labels(imap: InteractionMap, object_vocab: list[str],
                          body_vocab: list[str], synonyms: dict | None = None,
                          client: CompletionClient | None = None) -> InteractionMap:
    """Resolve free-text parts to declared vocabulary labels.

    Order of attempts per part: exact (case-insensitive) match, synonym
    table, then one cached mapping prompt when a client is supplied. A
    synonym may expand to several labels (e.g. hands covers both sides), in
    which case the pair multiplies out. Unmapped pairs are dropped with a
    logged reason; dropping every pair is an error.
    """
    if not object_vocab or not body_vocab:
        raise InvalidInputError("part vocabularies must be non-empty")
    tables = synonyms if synonyms is not None else load_synonym_tables()
    obj_syn = tables.get("object", {}).get(imap.object_category, {})
    obj_syn = {**tables.get("object", {}).get("*", {}), **obj_syn}
    body_syn = tables.get("body", {})

    out: list[tuple[str, str]] = []
    for obj_raw, body_raw in imap.pairs:
        obj_labels = _normalize_one(obj_raw, object_vocab, obj_syn, client)
        if not obj_labels:
            log.info("dropping pair (%s, %s): unmapped object part", obj_raw, body_raw)
            continue
        body_labels = _normalize_one(body_raw, body_vocab, body_syn, client)
        if not body_labels:
            log.info("dropping pair (%s, %s): unmapped body part", obj_raw, body_raw)
            continue
        for o in obj_labels:
            for b in body_labels:
                if (o, b) not in out:
                    out.append((o, b))
    if not out:
        raise NormalizationError(
            f"no contact pair for ({imap.action}, {imap.object_category}) survived normalization"
        )
    return InteractionMap(imap.action, imap.object_category, tuple(out))


VOTE_CORRECT = "correct"
VOTE_UNCERTAIN = "uncertain"
VOTE_INCORRECT = "incorrect"


def classify_votes(votes: int) -> str:
    """Threshold a 10-participant yes count: >6 correct, 4-6 uncertain, <4 incorrect."""
    if not isinstance(votes, (int,)) or isinstance(votes, bool):
        raise InvalidInputError(f"votes must be an integer, got {votes!r}")
    if votes < 0 or votes > 10:
        raise InvalidInputError(f"votes must be in [0, 10], got {votes}")
    if votes > 6:
        return VOTE_CORRECT
    if votes >= 4:
        return VOTE_UNCERTAIN
    return VOTE_INCORRECT
