"""HTTP client for pulling bug-report text from an issue tracker.

The client is optional plumbing: experiment runs consume only local corpus
files, so nothing in the pipeline calls out to the network. It speaks plain
HTTPS GET against a configurable base URL and expects a JSON object with at
least ``title`` and ``description`` for each bug.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import requests

from .corpus import BugReport
from .exceptions import DecodeError, NotFoundError, TransportError

MAX_RETRIES = 3


@dataclass
class TrackerClient:
    """Single-request-at-a-time client; run several instances to parallelize.

    Retries timeouts, connection failures, and 5xx responses up to
    ``max_retries`` times with exponential backoff starting at ``backoff``
    seconds. ``sleep`` is injectable so tests do not wait.
    """

    base_url: str
    timeout: float = 10.0
    max_retries: int = MAX_RETRIES
    backoff: float = 1.0
    session: requests.Session | None = None
    sleep: object = field(default=time.sleep, repr=False)

    def _get(self, url):
        http = self.session or requests
        last_error = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = http.get(url, timeout=self.timeout)
            except (requests.Timeout, requests.ConnectionError) as exc:
                last_error = exc
                continue
            if response.status_code == 404:
                raise NotFoundError(f"bug not found: {url}")
            if response.status_code >= 500:
                last_error = TransportError(
                    f"server error {response.status_code} from {url}"
                )
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"unexpected status {response.status_code} from {url}"
                )
            return response
        raise TransportError(
            f"giving up on {url} after {self.max_retries} retries: {last_error}"
        )

    def fetch_report(self, bug_id):
        """Fetch one bug report; labels are left unset for the caller."""
        if not bug_id:
            raise ValueError("bug_id must be nonempty")
        url = f"{self.base_url.rstrip('/')}/bugs/{bug_id}"
        response = self._get(url)
        try:
            payload = json.loads(response.content.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DecodeError(f"malformed payload from {url}: {exc}") from exc
        if not isinstance(payload, dict):
            raise DecodeError(f"expected a JSON object from {url}")
        missing = [k for k in ("title", "description") if k not in payload]
        if missing:
            raise DecodeError(f"payload from {url} missing {', '.join(missing)}")
        return BugReport(
            bug_id=str(payload.get("bug_id", bug_id)),
            project=str(payload.get("project", "")),
            title=str(payload["title"]),
            description=str(payload["description"]),
            is_bug=None,
            has_bic=None,
        )


def fetch_remote_report(endpoint, bug_id, timeout=10.0):
    """One-shot convenience wrapper around TrackerClient."""
    return TrackerClient(base_url=endpoint, timeout=timeout).fetch_report(bug_id)
