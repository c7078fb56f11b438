"""Versioned model checkpoint container.

A checkpoint is an ``.npz`` archive holding the parameter arrays verbatim
(float64 binary, so load(save(m)) round-trips bit-exactly) plus a JSON
manifest with the format version, a model kind tag, and arbitrary
JSON-serializable metadata.
"""

import json
from pathlib import Path

import numpy as np

from optwin.errors import SchemaError

FORMAT_VERSION = 1
_MANIFEST_KEY = "__manifest__"


def save_checkpoint(path, kind, arrays, meta=None):
    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "meta": meta or {},
        "names": list(arrays.keys()),
    }
    payload = {_MANIFEST_KEY: np.frombuffer(json.dumps(manifest).encode(), dtype=np.uint8)}
    for i, (name, arr) in enumerate(arrays.items()):
        payload[f"arr_{i}"] = np.asarray(arr)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        np.savez(fh, **payload)


def load_checkpoint(path, expect_kind=None):
    """Returns (kind, arrays, meta)."""
    with np.load(path) as data:
        if _MANIFEST_KEY not in data:
            raise SchemaError(f"{path}: not a checkpoint file (missing manifest)")
        manifest = json.loads(bytes(data[_MANIFEST_KEY]).decode())
        if manifest.get("format_version") != FORMAT_VERSION:
            raise SchemaError(
                f"{path}: unsupported checkpoint version {manifest.get('format_version')}"
            )
        kind = manifest["kind"]
        if expect_kind is not None and kind != expect_kind:
            raise SchemaError(f"{path}: expected kind {expect_kind!r}, found {kind!r}")
        arrays = {
            name: data[f"arr_{i}"] for i, name in enumerate(manifest["names"])
        }
    return kind, arrays, manifest["meta"]


def save_network(path, kind, network, meta=None):
    """Save a Network subclass (its config plus parameter arrays)."""
    meta = dict(meta or {})
    meta["network_config"] = network.config()
    save_checkpoint(path, kind, network.parameters(), meta)


def load_network(path, kind, cls):
    _, arrays, meta = load_checkpoint(path, expect_kind=kind)
    net = cls.from_config(meta["network_config"])
    params = net.parameters()
    for name, arr in arrays.items():
        params[name][...] = arr
    return net, meta
