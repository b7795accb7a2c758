"""Model provider abstraction: text + vision requests behind one interface.

The deterministic mock makes the whole pipeline testable offline with exact
oracles; the OpenAI-compatible adapter is the only code that talks to a real
endpoint and nothing in the test suite touches it.
"""

from __future__ import annotations

import base64
import hashlib
import re
from abc import ABC, abstractmethod
from typing import Callable, Sequence

from .errors import ProviderError
from .prompts import SUMMARY_TEMPLATE_PREFIX

_CHAPTER_RE = re.compile(r"Write chapter (\d+) with dialogues")


class ModelProvider(ABC):
    """Synchronous text/vision generation; attachments are opaque blob refs."""

    name: str = "provider"
    capabilities: frozenset[str] = frozenset({"text"})

    @abstractmethod
    def generate(self, prompt: str, attachments: Sequence[str] = ()) -> str:
        """Return generated text, or raise ProviderError."""

    @property
    def supports_vision(self) -> bool:
        return "vision" in self.capabilities


class MockProvider(ModelProvider):
    """Deterministic stand-in used by every test and the offline CLI.

    Contract:
      * chapter prompts -> "CH<k>:" + first 40 hex chars of the prompt's sha256
      * summary prompts -> "SUM(" + first 40 chars of the chapter being
        summarized + ")"
      * any call with an attachment (vision) -> a fixed sentinel sentence
    """

    name = "mock"
    capabilities = frozenset({"text", "vision"})

    VISION_SENTINEL = "A weathered stone courtyard at dusk, empty and still."

    def generate(self, prompt: str, attachments: Sequence[str] = ()) -> str:
        if attachments:
            return self.VISION_SENTINEL
        if prompt.startswith(SUMMARY_TEMPLATE_PREFIX):
            chapter = prompt[len(SUMMARY_TEMPLATE_PREFIX):]
            return f"SUM({chapter[:40]})"
        m = _CHAPTER_RE.search(prompt)
        if m:
            digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
            return f"CH{m.group(1)}:{digest[:40]}"
        digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
        return f"TEXT:{digest[:40]}"


_IMAGE_MAGIC = [
    (b"\x89PNG", "image/png"),
    (b"\xff\xd8\xff", "image/jpeg"),
    (b"GIF8", "image/gif"),
    (b"RIFF", "image/webp"),
]


def _image_mime(data: bytes) -> str:
    for magic, mime in _IMAGE_MAGIC:
        if data.startswith(magic):
            return mime
    return "image/png"


class OpenAICompatibleProvider(ModelProvider):
    """Adapter for any chat-completions endpoint speaking the OpenAI wire shape.

    ``blob_resolver`` turns an attachment ref into image bytes; it is injected
    by the service so this module stays storage-free.
    """

    name = "openai-compatible"
    capabilities = frozenset({"text", "vision"})

    def __init__(self, endpoint: str, model: str, api_key: str | None = None,
                 blob_resolver: Callable[[str], bytes | None] | None = None,
                 timeout: float = 120.0):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.blob_resolver = blob_resolver
        self.timeout = timeout

    def _content(self, prompt: str, attachments: Sequence[str]):
        if not attachments:
            return prompt
        parts: list[dict] = [{"type": "text", "text": prompt}]
        for ref in attachments:
            data = self.blob_resolver(ref) if self.blob_resolver else None
            if data is None:
                raise ProviderError(f"attachment {ref!r} could not be resolved")
            url = f"data:{_image_mime(data)};base64,{base64.b64encode(data).decode('ascii')}"
            parts.append({"type": "image_url", "image_url": {"url": url}})
        return parts

    def generate(self, prompt: str, attachments: Sequence[str] = ()) -> str:
        import httpx

        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": self._content(prompt, attachments)}],
        }
        try:
            response = httpx.post(f"{self.endpoint}/chat/completions", json=payload,
                                  headers=headers, timeout=self.timeout)
        except httpx.TransportError as exc:
            raise ProviderError(f"transport failure: {exc}", transient=True) from exc
        if response.status_code >= 500 or response.status_code == 429:
            raise ProviderError(f"provider returned {response.status_code}", transient=True)
        if response.status_code >= 400:
            raise ProviderError(
                f"provider rejected the request ({response.status_code}): {response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc


def make_provider(kind: str, *, endpoint: str | None = None, model: str | None = None,
                  api_key: str | None = None,
                  blob_resolver: Callable[[str], bytes | None] | None = None) -> ModelProvider:
    if kind == "mock":
        return MockProvider()
    if kind == "openai-compatible":
        if not endpoint or not model:
            raise ValueError("openai-compatible provider needs an endpoint and a model")
        return OpenAICompatibleProvider(endpoint, model, api_key=api_key,
                                        blob_resolver=blob_resolver)
    raise ValueError(f"unknown provider kind {kind!r}")
