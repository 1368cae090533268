"""Cloze prompt templates and rendering.

Templates live as plain-text package data and are rendered by literal
placeholder substitution (OBJECT, ACTION, PART, OPTIONS).
"""
from __future__ import annotations

from importlib import resources

from ..errors import InvalidInputError

SIZE_TEMPLATE = "object_size"
CONTACTS_TEMPLATE = "contacts"
LABEL_MAP_TEMPLATE = "label_map"


def load_template(name: str) -> str:
    ref = resources.files("hoifit").joinpath(f"data/templates/{name}.txt")
    return ref.read_text()


def render_size_prompt(category: str) -> str:
    category = category.strip().lower()
    if not category:
        raise InvalidInputError("empty object category")
    return load_template(SIZE_TEMPLATE).replace("OBJECT", category)


def render_contacts_prompt(action: str, category: str) -> str:
    action = action.strip().lower()
    category = category.strip().lower()
    if not action or not category:
        raise InvalidInputError("empty action or object category")
    return load_template(CONTACTS_TEMPLATE).replace("ACTION", action).replace("OBJECT", category)


def render_label_map_prompt(part: str, options: list[str]) -> str:
    part = part.strip().lower()
    if not part:
        raise InvalidInputError("empty part")
    if not options:
        raise InvalidInputError("empty option list")
    return (
        load_template(LABEL_MAP_TEMPLATE)
        .replace("OPTIONS", ", ".join(options))
        .replace("PART", part)
    )
