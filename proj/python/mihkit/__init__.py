"""Python interface to mihkit."""

import json

from ._mihkit import (
    ClusterSet,
    Error,
    InputError,
    IntegrityError,
    Ledger,
    ParseError,
    ValidationError,
    __version__,
    canonical_digest,
    canonical_serialize,
    cluster,
    cluster_hash,
    detect_full,
    detect_structural,
    generate_synthetic,
    run_cli,
    validate_cluster_record,
    validate_tag,
    verify_audit,
)
from ._mihkit import scan as _scan


def scan(ledger, **kwargs):
    """Detect CoinJoins; returns the scan result as a dict."""
    return json.loads(_scan(ledger, **kwargs))


__all__ = [
    "ClusterSet",
    "Error",
    "InputError",
    "IntegrityError",
    "Ledger",
    "ParseError",
    "ValidationError",
    "__version__",
    "canonical_digest",
    "canonical_serialize",
    "cluster",
    "cluster_hash",
    "detect_full",
    "detect_structural",
    "generate_synthetic",
    "run_cli",
    "scan",
    "validate_cluster_record",
    "validate_tag",
    "verify_audit",
]
