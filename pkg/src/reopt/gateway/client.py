"""OpenAI-compatible chat-completion transport.

Retries transport-level failures only; content-level retries belong to
the closed-loop budget, not here.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Optional

import httpx

from ..errors import AuthError, GatewayTimeout, TransportError
from .types import ChatRequest

ENV_BASE_URL = "REOPT_LLM_BASE_URL"
ENV_API_KEY = "REOPT_LLM_API_KEY"
ENV_MODEL = "REOPT_LLM_MODEL"


@dataclass(frozen=True)
class GatewayConfig:
    base_url: str
    api_key: str
    model: str = "gpt-4.1-mini"
    max_retries: int = 2
    backoff: float = 0.5


def config_from_env() -> GatewayConfig:
    base_url = os.environ.get(ENV_BASE_URL, "")
    api_key = os.environ.get(ENV_API_KEY, "")
    model = os.environ.get(ENV_MODEL, "gpt-4.1-mini")
    if not base_url:
        raise AuthError(f"{ENV_BASE_URL} is not configured")
    if not api_key:
        raise AuthError(f"{ENV_API_KEY} is not configured")
    return GatewayConfig(base_url=base_url, api_key=api_key, model=model)


def chat_complete(request: ChatRequest, config: Optional[GatewayConfig] = None,
                  transport: Optional[httpx.BaseTransport] = None) -> str:
    """Issue one chat-completion call and return the raw assistant text.

    ``transport`` is injectable for tests (httpx.MockTransport).
    """
    config = config or config_from_env()
    if not config.api_key:
        raise AuthError("no API key configured")
    url = config.base_url.rstrip("/") + "/chat/completions"
    body = {
        "model": request.model if request.model != "default" else config.model,
        "messages": [
            {"role": "system", "content": request.system},
            {"role": "user", "content": request.user},
        ],
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
    }
    headers = {"Authorization": f"Bearer {config.api_key}"}
    last_error: Exception | None = None
    for attempt in range(config.max_retries + 1):
        try:
            with httpx.Client(transport=transport, timeout=request.timeout) as client:
                response = client.post(url, json=body, headers=headers)
            if response.status_code in (401, 403):
                raise AuthError(f"endpoint rejected credential: HTTP {response.status_code}")
            if response.status_code >= 500:
                last_error = TransportError(f"HTTP {response.status_code}")
            else:
                response.raise_for_status()
                payload = response.json()
                return payload["choices"][0]["message"]["content"]
        except httpx.TimeoutException as exc:
            raise GatewayTimeout(f"no answer within {request.timeout}s") from exc
        except httpx.HTTPStatusError as exc:
            raise TransportError(f"HTTP {exc.response.status_code}: {exc}") from exc
        except httpx.TransportError as exc:
            last_error = exc
        except (KeyError, ValueError) as exc:
            raise TransportError(f"malformed completion payload: {exc}") from exc
        if attempt < config.max_retries:
            time.sleep(config.backoff * (2 ** attempt))
    raise TransportError(f"endpoint unreachable after {config.max_retries + 1} attempts: {last_error}")
