"""On-disk store for untwisted Hall numbers.

One JSON file per (q, orientation, dimension vector of the target class).
Entries are keyed by the target class and the dimension of the submodule and
hold [quotient class, sub class, count] triples.  Counts do not depend on the
twist convention, so the files can be shared by every convention.
"""
from __future__ import annotations

import atexit
import json
import os
import tempfile
import threading
from pathlib import Path

from .kronrep import IsoClass, PLUS


def _entry_key(z: IsoClass, subdims) -> str:
    return f"{z.dumps()}|{subdims[0]},{subdims[1]}"


class HallNumberStore:
    """JSON store buffered in memory; flush() (also run at exit) writes dirty files."""

    def __init__(self, root):
        self.root = Path(root)
        self._files: dict = {}
        self._lock = threading.Lock()
        self._dirty: set = set()
        self.hits = 0
        self.misses = 0
        atexit.register(self.flush)

    def _path(self, q, orientation, dims) -> Path:
        tag = "plus" if orientation == PLUS else "minus"
        return self.root / f"q{q}" / f"{tag}_{dims[0]}_{dims[1]}.json"

    def _load(self, q, orientation, dims) -> dict:
        fkey = (q, orientation, tuple(dims))
        table = self._files.get(fkey)
        if table is None:
            path = self._path(q, orientation, dims)
            table = json.loads(path.read_text()) if path.exists() else {}
            self._files[fkey] = table
        return table

    def get(self, z: IsoClass, subdims):
        table = self._load(z.q, z.orientation, z.dims)
        raw = table.get(_entry_key(z, subdims))
        if raw is None:
            self.misses += 1
            return None
        self.hits += 1
        return {(IsoClass.from_json(a), IsoClass.from_json(b)): n for a, b, n in raw}

    def put(self, z: IsoClass, subdims, counts: dict) -> None:
        with self._lock:
            table = self._load(z.q, z.orientation, z.dims)
            rows = sorted(([a.to_json(), b.to_json(), n] for (a, b), n in counts.items()),
                          key=lambda r: json.dumps(r[:2], sort_keys=True))
            table[_entry_key(z, subdims)] = rows
            self._dirty.add((z.q, z.orientation, tuple(z.dims)))

    def flush(self) -> None:
        with self._lock:
            for fkey in sorted(self._dirty):
                self._write(self._path(*fkey), self._files[fkey])
            self._dirty.clear()

    @staticmethod
    def _write(path: Path, table: dict) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(table, fh, sort_keys=True, separators=(",", ":"))
        os.replace(tmp, path)

    def files(self) -> list[Path]:
        return sorted(self.root.glob("q*/*.json"))
