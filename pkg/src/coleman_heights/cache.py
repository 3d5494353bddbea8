"""On-disk cache of Frobenius data, one file per (model, p, digits, format)."""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from pathlib import Path

from .frobenius import FORMAT_TAG, FrobeniusData, frobenius_matrix, to_short_model
from .padic import PadicContext

log = logging.getLogger(__name__)

CACHE_VERSION = "coleman-cache 1"
ENV_VAR = "COLEMAN_CACHE_DIR"


def default_cache_dir() -> Path | None:
    d = os.environ.get(ENV_VAR)
    return Path(d) if d else None


def cache_key(ainvs, p: int, N: int) -> str:
    coeffs = ",".join(str(a) for a in ainvs)
    return f"{CACHE_VERSION}|{FORMAT_TAG}|{coeffs}|p={p}|N={N}"


def cache_path(cache_dir, key: str) -> Path:
    return Path(cache_dir) / (hashlib.sha256(key.encode()).hexdigest() + ".frob")


def write_record(path: Path, key: str, fd: FrobeniusData) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    body = f"{CACHE_VERSION}\nkey {key}\n{fd.to_text()}"
    fh = tempfile.NamedTemporaryFile("w", dir=path.parent, prefix=".tmp-", suffix=".frob", delete=False)
    try:
        with fh:
            fh.write(body)
        os.replace(fh.name, path)
    except BaseException:
        Path(fh.name).unlink(missing_ok=True)
        raise


def read_record(path: Path, key: str) -> FrobeniusData | None:
    """The cached data, or None when missing, stale or unreadable."""
    try:
        text = path.read_text()
    except FileNotFoundError:
        return None
    except OSError as exc:
        log.warning("cannot read cache file %s: %s", path, exc)
        return None
    version, _, rest = text.partition("\n")
    if version != CACHE_VERSION:
        log.warning("cache file %s has version %r, recomputing", path, version)
        return None
    keyline, _, payload = rest.partition("\n")
    if keyline != f"key {key}":
        log.warning("cache file %s belongs to another key, recomputing", path)
        return None
    try:
        return FrobeniusData.from_text(payload)
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        log.warning("cache file %s is corrupt (%s), recomputing", path, exc)
        return None


def cached_frobenius(curve, ctx: PadicContext, cache_dir=None) -> FrobeniusData:
    cache_dir = cache_dir if cache_dir is not None else default_cache_dir()
    if cache_dir is None:
        return frobenius_matrix(to_short_model(curve, ctx), ctx)
    key = cache_key(curve.ainvs, ctx.p, ctx.N)
    path = cache_path(cache_dir, key)
    fd = read_record(path, key)
    if fd is None:
        fd = frobenius_matrix(to_short_model(curve, ctx), ctx)
        write_record(path, key, fd)
    return fd
