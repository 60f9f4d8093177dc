"""JSON disk cache for exact tables.

Entries are single JSON documents written atomically (temp file then
os.replace), so concurrent readers always see a complete old or new
version.  Unreadable or version-skewed entries are discarded with a
warning and recomputed, never reused silently.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path

FORMAT_VERSION = 1

log = logging.getLogger(__name__)


class DiskCache:
    """Directory-backed cache; with no directory configured every lookup
    misses and every store is a no-op."""

    def __init__(self, directory: str | Path | None = None):
        if directory is None:
            directory = os.environ.get("HECKE_LAB_CACHE_DIR")
        self.directory = Path(directory) if directory else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> dict | None:
        if self.directory is None:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text())
        except (json.JSONDecodeError, OSError, UnicodeDecodeError) as exc:
            log.warning("cache entry %s unreadable (%s); recomputing", key, exc)
            return None
        if not isinstance(doc, dict) or doc.get("format_version") != FORMAT_VERSION:
            log.warning(
                "cache entry %s has format_version %r, expected %r; recomputing",
                key, doc.get("format_version") if isinstance(doc, dict) else None,
                FORMAT_VERSION,
            )
            return None
        return doc

    def put(self, key: str, doc: dict) -> None:
        if self.directory is None:
            return
        payload = dict(doc)
        payload.setdefault("format_version", FORMAT_VERSION)
        data = json.dumps(payload, sort_keys=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=key, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(data)
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _coset_doc(p: int, n: int) -> dict:
    from .cosets import all_labels, class_right_reps

    return {
        "format_version": FORMAT_VERSION,
        "p": p,
        "n": n,
        "classes": {
            lab: [[g.a, g.b, g.c, g.d] for g in class_right_reps(p, n, lab)]
            for lab in all_labels(p, n)
        },
    }


def cache_roundtrip(key: str, directory: str | Path | None = None) -> bool:
    """Serialize-then-load identity check for one cacheable object.

    Keys: 'struct_p{p}_n{n}_conrey{c}' for a structure-constant table,
    'cosets_p{p}_n{n}' for a coset decomposition table.  Returns True when
    the reloaded object re-serializes to the identical byte string.
    """
    from .characters import PChar
    from .hecke import StructTable, structure_table

    def run(cache: DiskCache) -> bool:
        parts = key.split("_")
        if parts[0] == "struct":
            p = int(parts[1][1:])
            n = int(parts[2][1:])
            conrey = int(parts[3][6:])
            chi = PChar.from_conrey(p, n, conrey)
            table = structure_table(p, n, chi)
            cache.put(key, table.to_jsonable())
            doc = cache.get(key)
            if doc is None:
                return False
            reloaded = StructTable.from_jsonable(doc, chi.field)
            first = json.dumps(table.to_jsonable(), sort_keys=True)
            second = json.dumps(reloaded.to_jsonable(), sort_keys=True)
            return first == second
        if parts[0] == "cosets":
            p = int(parts[1][1:])
            n = int(parts[2][1:])
            doc = _coset_doc(p, n)
            cache.put(key, doc)
            got = cache.get(key)
            if got is None:
                return False
            return json.dumps(got, sort_keys=True) == json.dumps(doc, sort_keys=True)
        raise ValueError(f"unrecognized cache key {key!r}")

    if directory is not None:
        return run(DiskCache(directory))
    with tempfile.TemporaryDirectory() as tmp:
        return run(DiskCache(tmp))
