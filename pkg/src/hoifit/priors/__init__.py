from .client import (
    API_KEY_ENV,
    CachedClient,
    CompletionClient,
    HttpCompletionClient,
    PromptRecord,
    builtin_cache_path,
    cache_key,
)
from .prompts import render_contacts_prompt, render_label_map_prompt, render_size_prompt
from .queries import (
    SIZE_BAND,
    InteractionMap,
    SizePrior,
    classify_votes,
    load_synonym_tables,
    normalize_part_labels,
    parse_contacts_response,
    parse_size_response,
    query_contacts,
    query_object_size,
)

__all__ = [
    "API_KEY_ENV",
    "CachedClient",
    "CompletionClient",
    "HttpCompletionClient",
    "InteractionMap",
    "PromptRecord",
    "SIZE_BAND",
    "SizePrior",
    "builtin_cache_path",
    "cache_key",
    "classify_votes",
    "load_synonym_tables",
    "normalize_part_labels",
    "parse_contacts_response",
    "parse_size_response",
    "query_contacts",
    "query_object_size",
    "render_contacts_prompt",
    "render_label_map_prompt",
    "render_size_prompt",
]
