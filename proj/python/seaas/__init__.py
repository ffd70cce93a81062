# Copyright 2026 The SeaaS Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the SeaaS engine."""

import json

from . import _seaas
from ._seaas import (  # noqa: F401
    DuplicateRule,
    Error,
    ExportError,
    FrameTooLarge,
    FramingError,
    InvalidRule,
    LedgerError,
    MalformedMessage,
    MetricError,
    ParseError,
    PolicyError,
    ProtocolError,
    TrialInvalid,
    UnknownResource,
    classify_criticality,
    compute_detection_metrics,
    work_cost,
)

__all__ = [
    "Service",
    "canonical_policy",
    "classify_criticality",
    "compute_detection_metrics",
    "decode_frame",
    "default_policy_pack",
    "encode_frame",
    "evaluate",
    "run_suite",
    "work_cost",
]


def canonical_policy(document):
    """Parse a policy document (str or dict) and return its canonical text."""
    if not isinstance(document, str):
        document = json.dumps(document)
    return _seaas.canonical_policy(document)


def default_policy_pack():
    return json.loads(_seaas.default_policy_pack())


def evaluate(policy, event):
    """Decision dict for one access event under a policy document."""
    if not isinstance(policy, str):
        policy = json.dumps(policy)
    return json.loads(_seaas.evaluate_json(policy, json.dumps(event)))


def encode_frame(message):
    return _seaas.encode_frame(json.dumps(message))


def decode_frame(data):
    """Returns (message dict or None, bytes consumed)."""
    body, consumed = _seaas.decode_frame(bytes(data))
    return (json.loads(body) if body is not None else None), consumed


def run_suite(suite_dir, policy, trials=5, seed=42):
    if not isinstance(policy, str):
        policy = json.dumps(policy)
    return [json.loads(r) for r in _seaas.run_suite(str(suite_dir), policy, trials, seed)]


class Service:
    """In-process cloud service driven by protocol message dicts."""

    def __init__(self, policy=None):
        if policy is not None and not isinstance(policy, str):
            policy = json.dumps(policy)
        self._svc = _seaas.Service(policy)

    def handle(self, message):
        return [json.loads(r) for r in self._svc.handle(json.dumps(message))]

    def take_pushed(self):
        return [json.loads(r) for r in self._svc.take_pushed()]

    def put_policy(self, document):
        if not isinstance(document, str):
            document = json.dumps(document)
        return self._svc.put_policy(document)

    def set_permission(self, device_id, app_id, resource, verdict):
        return self._svc.set_permission(device_id, app_id, resource, verdict)

    def active_policy(self):
        return json.loads(self._svc.active_policy())

    def threats(self):
        return [json.loads(t) for t in self._svc.threats()]
