"""Python bindings for the Writor feedback core."""

import json

from . import _writor
from ._writor import (
    NotFoundError,
    PreconditionError,
    ProviderError,
    measure,
    metrics_data_hash,
    paired_t_test,
    validate_card,
)

__all__ = [
    "NotFoundError",
    "PreconditionError",
    "ProviderError",
    "audit",
    "feedback",
    "measure",
    "metrics_data_hash",
    "paired_t_test",
    "resolve_anchor",
    "validate_card",
]


def resolve_anchor(quote, draft):
    return json.loads(_writor.resolve_anchor(quote, draft))


def feedback(essay, context, goals, transcript=None, seed=0, baseline=False):
    """Run the pipeline (or the baseline) offline; returns a list of card dicts."""
    raw = _writor.feedback(essay, json.dumps(context), list(goals), str(transcript or ""), seed, baseline)
    return json.loads(raw)


def audit(corpus, transcripts=None, runs=3, format="json", seed=0):
    """Pipeline-versus-baseline audit. JSON comes back parsed; markdown and csv as text."""
    out = _writor.audit(str(corpus), str(transcripts or ""), runs, format, seed)
    return json.loads(out) if format == "json" else out
