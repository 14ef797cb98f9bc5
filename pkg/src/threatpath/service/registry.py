"""Directory-per-model registry with a single-active-model invariant."""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import asdict, dataclass
from pathlib import Path

from ..classifier import HierarchicalModel, load_model, save_model


@dataclass
class RegistryEntry:
    model_id: str
    snapshot_id: str
    metrics: dict
    state: str  # staged | active | retired
    created: str


class ModelRegistry:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _entry_path(self, model_id: str) -> Path:
        return self.root / model_id / "entry.json"

    def entries(self) -> list[RegistryEntry]:
        out = []
        for entry_file in sorted(self.root.glob("*/entry.json")):
            out.append(RegistryEntry(**json.loads(entry_file.read_text())))
        return out

    def get_entry(self, model_id: str) -> RegistryEntry | None:
        path = self._entry_path(model_id)
        if not path.exists():
            return None
        return RegistryEntry(**json.loads(path.read_text()))

    def load(self, model_id: str) -> HierarchicalModel:
        blob = (self.root / model_id / "model.bin").read_bytes()
        return load_model(blob)

    def store(self, model: HierarchicalModel, metrics: dict, created: str) -> RegistryEntry:
        blob = save_model(model)
        model_id = hashlib.sha256(blob).hexdigest()
        entry = RegistryEntry(
            model_id=model_id,
            snapshot_id=model.trained_on,
            metrics=metrics,
            state="staged",
            created=created,
        )
        with self._lock:
            directory = self.root / model_id
            directory.mkdir(parents=True, exist_ok=True)
            (directory / "model.bin").write_bytes(blob)
            self._write_entry(entry)
        return entry

    def _write_entry(self, entry: RegistryEntry) -> None:
        path = self._entry_path(entry.model_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(asdict(entry), indent=2, sort_keys=True))
        tmp.rename(path)

    def activate(self, model_id: str) -> RegistryEntry:
        with self._lock:
            target = self.get_entry(model_id)
            if target is None:
                raise KeyError(f"model {model_id} not in registry")
            for entry in self.entries():
                if entry.state == "active" and entry.model_id != model_id:
                    entry.state = "retired"
                    self._write_entry(entry)
            target.state = "active"
            self._write_entry(target)
            return target

    def active_entry(self) -> RegistryEntry | None:
        active = [e for e in self.entries() if e.state == "active"]
        if not active:
            return None
        if len(active) > 1:
            # crash-recovery repair: newest wins, the rest retire
            active.sort(key=lambda e: (e.created, e.model_id))
            for stale in active[:-1]:
                stale.state = "retired"
                self._write_entry(stale)
            return active[-1]
        return active[0]
