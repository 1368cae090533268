"""Bundled reference priors and the replay cache built from them.

These tables freeze one captured set of completions (sizes in meters for 20
categories plus action-conditioned contact pairs) so the whole pipeline runs
offline and deterministically. `build_builtin_cache` renders the exact
prompts the queries use and writes the matching replay records.
"""
from __future__ import annotations

from pathlib import Path

from .client import PromptRecord
from .prompts import CONTACTS_TEMPLATE, SIZE_TEMPLATE, render_contacts_prompt, render_size_prompt

FIXTURE_MODEL_ID = "gpt-3"
_FIXTURE_TIMESTAMP = "2022-06-01T00:00:00Z"

# category -> size in meters (longest axis)
OBJECT_SIZES = {
    "backpack": 0.5,
    "bag": 0.5,
    "bed": 2.0,
    "bottle": 0.3,
    "bowl": 0.15,
    "chair": 0.85,
    "clock": 0.3,
    "couch": 0.91,
    "cup": 0.1,
    "desk": 0.75,
    "door": 2.1,
    "handbag": 0.3,
    "hat": 0.3,
    "keyboard": 0.61,
    "knife": 0.22,
    "microwave": 0.5,
    "mug": 0.12,
    "scissors": 0.2,
    "suitcase": 0.81,
    "table": 0.75,
}

# (category, action) -> ordered (object part, body part) pairs
CONTACT_PAIRS = {
    ("chair", "sit"): [("chair seat", "butt"), ("chair back", "back")],
    ("chair", "carry"): [
        ("chair arms", "hands"),
        ("chair back", "hands"),
        ("chair seat", "hands"),
    ],
    ("chair", "rest"): [("chair seat", "butt"), ("chair back", "back")],
    ("chair", "stand on"): [("chair seat", "feet")],
    ("chair", "stand next to"): [("chair back", "hands")],
    ("chair", "sleep"): [("chair seat", "butt"), ("chair back", "back")],
    ("table", "sit"): [
        ("tabletop", "butt"),
        ("tabletop", "left leg"),
        ("tabletop", "right leg"),
    ],
    ("table", "work"): [("tabletop", "hands")],
    ("table", "arrange"): [("tabletop", "hands")],
    ("table", "lay"): [("tabletop", "body")],
    ("table", "place"): [("tabletop", "hands")],
    ("backpack", "carry"): [("shoulder strap", "hands"), ("support", "hands")],
    ("backpack", "backpack"): [
        ("shoulder strap", "shoulders"),
        ("support", "shoulders"),
        ("bag body", "back"),
    ],
    ("backpack", "mount"): [
        ("shoulder strap", "hands"),
        ("shoulder strap", "waist"),
        ("support", "hands"),
        ("support", "waist"),
    ],
    ("suitcase", "carry"): [("handle", "hands")],
    ("suitcase", "pack"): [("zipper", "hands")],
    ("suitcase", "lug"): [("handle", "hands")],
    ("suitcase", "throw"): [("handle", "hands")],
    ("scissors", "cut"): [("blade handle", "hands"), ("handle", "hands")],
    ("scissors", "pass"): [
        ("blade", "hands"),
        ("blade handle", "hands"),
        ("handle", "hands"),
        ("securing clip", "hands"),
    ],
    ("keyboard", "type"): [("key", "hands")],
    ("keyboard", "play"): [("key", "hands")],
    ("keyboard", "control"): [("key", "hands")],
    ("keyboard", "enter"): [("key", "hands")],
    ("bowl", "hold"): [("bowl", "hands")],
    ("bowl", "serve"): [("bowl", "hands")],
    ("bowl", "eat"): [("bowl", "mouth")],
    ("bowl", "wash"): [("bowl", "hands")],
}


def fixture_records() -> list[PromptRecord]:
    records = []
    for category, size in sorted(OBJECT_SIZES.items()):
        records.append(
            PromptRecord(
                template_id=SIZE_TEMPLATE,
                prompt=render_size_prompt(category),
                response=f" {size}m",
                timestamp=_FIXTURE_TIMESTAMP,
                model_id=FIXTURE_MODEL_ID,
            )
        )
    for (category, action), pairs in sorted(CONTACT_PAIRS.items()):
        text = ", ".join(f"{o}/{b}" for o, b in pairs)
        records.append(
            PromptRecord(
                template_id=CONTACTS_TEMPLATE,
                prompt=render_contacts_prompt(action, category),
                response=f" {text}",
                timestamp=_FIXTURE_TIMESTAMP,
                model_id=FIXTURE_MODEL_ID,
            )
        )
    return records


def build_builtin_cache(path) -> int:
    records = fixture_records()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("\n".join(r.to_json() for r in records) + "\n")
    return len(records)
