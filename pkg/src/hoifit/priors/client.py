"""Completion clients: live HTTP endpoint and append-only replay cache.

All tests and the shipped pipeline run entirely from the replay cache; the
live client exists for capturing new priors and is rate limited. Cache keys
hash the filled prompt together with the model id, so a cache hit replays
the exact completion the live call produced.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from ..errors import CacheMissError, InvalidInputError

API_KEY_ENV = "HOIFIT_API_KEY"


def cache_key(prompt: str, model_id: str) -> str:
    return hashlib.sha256((model_id + "\x00" + prompt).encode()).hexdigest()


@dataclass(frozen=True)
class PromptRecord:
    template_id: str
    prompt: str
    response: str
    timestamp: str
    model_id: str

    @property
    def key(self) -> str:
        return cache_key(self.prompt, self.model_id)

    def to_json(self) -> str:
        return json.dumps(
            {
                "key": self.key,
                "template": self.template_id,
                "prompt": self.prompt,
                "response": self.response,
                "timestamp": self.timestamp,
                "model": self.model_id,
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "PromptRecord":
        d = json.loads(line)
        return cls(d["template"], d["prompt"], d["response"], d["timestamp"], d["model"])


class CompletionClient(Protocol):
    model_id: str

    def complete(self, prompt: str, template_id: str = "") -> str: ...


class HttpCompletionClient:
    """Minimal client for an OpenAI-style text-completion endpoint."""

    def __init__(self, endpoint: str, model_id: str = "gpt-3",
                 temperature: float = 0.0, max_tokens: int = 64,
                 stop: tuple[str, ...] = ("\n\n",),
                 min_interval_s: float = 0.25, timeout_s: float = 30.0):
        self.endpoint = endpoint
        self.model_id = model_id
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.stop = list(stop)
        self.min_interval_s = min_interval_s
        self.timeout_s = timeout_s
        self._last_call = 0.0
        self._lock = threading.Lock()

    def complete(self, prompt: str, template_id: str = "") -> str:
        import requests

        api_key = os.environ.get(API_KEY_ENV, "")
        with self._lock:
            wait = self.min_interval_s - (time.monotonic() - self._last_call)
            if wait > 0:
                time.sleep(wait)
            self._last_call = time.monotonic()
        resp = requests.post(
            self.endpoint,
            headers={"Authorization": f"Bearer {api_key}"} if api_key else {},
            json={
                "model": self.model_id,
                "prompt": prompt,
                "temperature": self.temperature,
                "max_tokens": self.max_tokens,
                "stop": self.stop,
            },
            timeout=self.timeout_s,
        )
        resp.raise_for_status()
        return resp.json()["choices"][0]["text"]


class CachedClient:
    """Replay cache in front of an optional live client.

    Misses go to the live client only when `allow_live`; fresh completions
    are appended to the cache file. Reads are lock-free (the cache dict is
    only grown); writes serialize on a lock.
    """

    def __init__(self, cache_path, live: CompletionClient | None = None,
                 allow_live: bool = False, model_id: str | None = None):
        self.cache_path = Path(cache_path)
        self.live = live
        self.allow_live = allow_live
        self.model_id = model_id or (live.model_id if live else "gpt-3")
        self._records: dict[str, PromptRecord] = {}
        self._write_lock = threading.Lock()
        if self.cache_path.exists():
            for line in self.cache_path.read_text().splitlines():
                if line.strip():
                    rec = PromptRecord.from_json(line)
                    self._records[rec.key] = rec

    def __len__(self) -> int:
        return len(self._records)

    def lookup(self, prompt: str) -> PromptRecord | None:
        return self._records.get(cache_key(prompt, self.model_id))

    def complete(self, prompt: str, template_id: str = "") -> str:
        hit = self.lookup(prompt)
        if hit is not None:
            return hit.response
        if not self.allow_live or self.live is None:
            raise CacheMissError(
                f"prompt not in cache {self.cache_path} and live calls are disabled"
            )
        response = self.live.complete(prompt, template_id)
        rec = PromptRecord(
            template_id=template_id,
            prompt=prompt,
            response=response,
            timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            model_id=self.model_id,
        )
        self.put(rec)
        return response

    def put(self, record: PromptRecord) -> None:
        if record.model_id != self.model_id:
            raise InvalidInputError(
                f"record model {record.model_id!r} does not match cache model {self.model_id!r}"
            )
        with self._write_lock:
            self._records[record.key] = record
            self.cache_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.cache_path, "a") as fh:
                fh.write(record.to_json() + "\n")


def builtin_cache_path() -> Path:
    """The prior cache shipped as package data (covers the bundled tables)."""
    from importlib import resources

    return Path(str(resources.files("hoifit").joinpath("data/prior_cache.jsonl")))
