"""Minimal chat-completion client over the standard JSON wire format.

POST {"model", "messages", ...decoding} to the configured endpoint and
read choices[0].message.content back. Transport trouble (timeouts,
connection errors, 429/5xx) is retryable with backoff; authentication and
other 4xx replies are fatal and never retried.
"""

from __future__ import annotations

import os
import time
from typing import Any, Mapping, Sequence

import requests

from evoloop.errors import FatalChatError, RetryableChatError

CHAT_URL_ENV = "EVOLOOP_CHAT_URL"
CHAT_KEY_ENV = "EVOLOOP_CHAT_API_KEY"
CHAT_MODEL_ENV = "EVOLOOP_CHAT_MODEL"

DEFAULT_TIMEOUT_S = 120.0
DEFAULT_RETRIES = 3
DEFAULT_BACKOFF_S = 1.0


class ChatClient:
    def __init__(self, url: str | None = None, api_key: str | None = None,
                 model: str | None = None, timeout_s: float = DEFAULT_TIMEOUT_S,
                 retries: int = DEFAULT_RETRIES, backoff_s: float = DEFAULT_BACKOFF_S):
        self.url = url or os.environ.get(CHAT_URL_ENV, "")
        self.api_key = api_key if api_key is not None else os.environ.get(CHAT_KEY_ENV, "")
        self.model = model or os.environ.get(CHAT_MODEL_ENV, "")
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s
        if not self.url:
            raise FatalChatError(f"no chat endpoint configured ({CHAT_URL_ENV})")

    def complete(self, messages: Sequence[Mapping[str, str]],
                 decoding: Mapping[str, Any] | None = None) -> str:
        """Return the assistant reply text, retrying transient failures."""
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                return self._request_once(messages, decoding or {})
            except RetryableChatError as exc:
                last_error = exc
                if attempt < self.retries:
                    time.sleep(self.backoff_s * (2 ** attempt))
        raise RetryableChatError(f"chat endpoint failed after {self.retries + 1} attempts: {last_error}")

    def _request_once(self, messages: Sequence[Mapping[str, str]],
                      decoding: Mapping[str, Any]) -> str:
        body: dict[str, Any] = {"messages": [dict(m) for m in messages]}
        if self.model:
            body["model"] = self.model
        body.update(decoding)
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(self.url, json=body, headers=headers, timeout=self.timeout_s)
        except requests.Timeout as exc:
            raise RetryableChatError(f"request timed out after {self.timeout_s}s") from exc
        except requests.RequestException as exc:
            raise RetryableChatError(f"request failed: {exc}") from exc

        if response.status_code == 429 or response.status_code >= 500:
            raise RetryableChatError(f"endpoint returned {response.status_code}")
        if response.status_code >= 400:
            raise FatalChatError(f"endpoint returned {response.status_code}: {response.text[:200]}")
        try:
            payload = response.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise RetryableChatError(f"malformed chat reply: {exc}") from exc
        if not isinstance(content, str):
            raise RetryableChatError("chat reply content is not text")
        return content


def chat_complete(messages: Sequence[Mapping[str, str]],
                  decoding: Mapping[str, Any] | None = None, **client_kwargs) -> str:
    """One-shot convenience wrapper around :class:`ChatClient`."""
    return ChatClient(**client_kwargs).complete(messages, decoding)
