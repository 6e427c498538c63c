"""Durable annotation-project store.

Layout per project under the store root:

    <project_id>/project.json     metadata, roster, assignments (write-once)
    <project_id>/segments.jsonl   the corpus (write-once)
    <project_id>/log.jsonl        append-only save records
    <project_id>/snapshot.json    compacted state + log position (periodic)

Every save is appended and fsynced before it is acknowledged, so an
acknowledged write survives any crash.  Recovery loads the snapshot (if
any), replays the remaining log records, and tolerates a torn trailing
line, which can only belong to an unacknowledged write.  Writes to one
(segment, annotator) slot are serialized by optimistic versioning: a
save must present the slot's current version and atomically replaces
the slot's span set.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus import (Corpus, read_segments, segment_to_record,
                      span_from_record, span_to_record,
                      validate_span_against, write_segments)
from ..errors import StoreError
from ..taxonomy import (BUILTIN_NAMES, TaxonomySchema, load_builtin,
                        load_taxonomy)

LAYERS = ("lightweight", "diagnostic")

SNAPSHOT_EVERY = 100


class NotFoundError(StoreError):
    pass


class AuthError(StoreError):
    pass


class ConflictError(StoreError):
    def __init__(self, message: str, current: dict):
        super().__init__(message)
        self.current = current


@dataclass
class Slot:
    version: int = 0
    spans: list[dict] = field(default_factory=list)
    note: str | None = None

    def to_dict(self) -> dict:
        return {"version": self.version, "spans": self.spans, "note": self.note}


@dataclass
class Project:
    project_id: str
    taxonomy_name: str
    layer: str
    client_token: str | None
    payload_digest: str
    roster: dict[str, str]            # annotator_id -> bearer token
    assignments: dict[str, list[str]]
    corpus: Corpus
    schema: TaxonomySchema
    slots: dict[tuple[str, str], Slot] = field(default_factory=dict)
    saves_applied: int = 0

    def slot(self, segment_id: str, annotator_id: str) -> Slot:
        return self.slots.setdefault((segment_id, annotator_id), Slot())


def _fsync_dir(path: Path) -> None:
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


def _write_durable(path: Path, content: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(content)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)
    _fsync_dir(path.parent)


def _payload_digest(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ProjectStore:
    """Annotation projects persisted under one root directory."""

    def __init__(self, root, taxonomy_dir=None,
                 snapshot_every: int = SNAPSHOT_EVERY):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.taxonomy_dir = Path(taxonomy_dir) if taxonomy_dir else None
        self.snapshot_every = snapshot_every
        self._lock = threading.RLock()
        self._projects: dict[str, Project] = {}
        self._log_handles: dict[str, object] = {}
        self._by_token: dict[str, str] = {}
        self._load_all()

    # -- taxonomy resolution ------------------------------------------------

    def resolve_taxonomy(self, name: str) -> TaxonomySchema:
        if self.taxonomy_dir is not None:
            candidate = self.taxonomy_dir / f"{name}.taxonomy"
            if candidate.is_file():
                return load_taxonomy(candidate.read_text("utf-8"), name=name)
        if name in BUILTIN_NAMES:
            return load_builtin(name)
        raise NotFoundError(f"unknown taxonomy {name!r}")

    # -- recovery -----------------------------------------------------------

    def _load_all(self) -> None:
        for entry in sorted(self.root.iterdir()) if self.root.is_dir() else []:
            if entry.is_dir() and (entry / "project.json").is_file():
                project = self._load_project(entry)
                self._projects[project.project_id] = project
                if project.client_token:
                    self._by_token[project.client_token] = project.project_id

    def _load_project(self, directory: Path) -> Project:
        meta = json.loads((directory / "project.json").read_text("utf-8"))
        segments = read_segments((directory / "segments.jsonl").read_text("utf-8"))
        schema = self.resolve_taxonomy(meta["taxonomy_name"])
        project = Project(
            project_id=meta["project_id"],
            taxonomy_name=meta["taxonomy_name"],
            layer=meta["layer"],
            client_token=meta.get("client_token"),
            payload_digest=meta["payload_digest"],
            roster=dict(meta["roster"]),
            assignments={k: list(v) for k, v in meta["assignments"].items()},
            corpus=Corpus(segments),
            schema=schema,
        )
        snapshot_path = directory / "snapshot.json"
        if snapshot_path.is_file():
            snap = json.loads(snapshot_path.read_text("utf-8"))
            project.saves_applied = snap["saves_applied"]
            for key, slot in snap["slots"].items():
                segment_id, _, annotator_id = key.partition("\x00")
                project.slots[(segment_id, annotator_id)] = Slot(
                    version=slot["version"],
                    spans=list(slot["spans"]),
                    note=slot["note"],
                )
        self._replay_log(directory, project)
        return project

    def _replay_log(self, directory: Path, project: Project) -> None:
        log_path = directory / "log.jsonl"
        if not log_path.is_file():
            return
        raw = log_path.read_bytes()
        # A torn tail (no trailing newline) can only belong to an
        # unacknowledged write; truncate it so later appends stay clean.
        if raw and not raw.endswith(b"\n"):
            keep = raw.rfind(b"\n") + 1
            with open(log_path, "r+b") as f:
                f.truncate(keep)
                f.flush()
                os.fsync(f.fileno())
            raw = raw[:keep]
        lines = raw.decode("utf-8").split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        for index, line in enumerate(lines):
            if index < project.saves_applied:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                raise StoreError(
                    f"project {project.project_id!r}: corrupt log record "
                    f"{index + 1}") from None
            slot = project.slot(record["segment_id"], record["annotator_id"])
            slot.version = record["version"]
            slot.spans = list(record["spans"])
            slot.note = record.get("note")
            project.saves_applied = index + 1

    def _log_handle(self, project_id: str):
        handle = self._log_handles.get(project_id)
        if handle is None or handle.closed:
            handle = open(self.root / project_id / "log.jsonl", "a",
                          encoding="utf-8")
            self._log_handles[project_id] = handle
        return handle

    def close(self) -> None:
        with self._lock:
            for handle in self._log_handles.values():
                if not handle.closed:
                    handle.close()
            self._log_handles.clear()

    # -- operations ---------------------------------------------------------

    def _project(self, project_id: str) -> Project:
        project = self._projects.get(project_id)
        if project is None:
            raise NotFoundError(f"unknown project {project_id!r}")
        return project

    def authorize(self, project_id: str, annotator_id: str,
                  token: str | None) -> Project:
        project = self._project(project_id)
        expected = project.roster.get(annotator_id)
        if expected is None:
            raise NotFoundError(
                f"annotator {annotator_id!r} is not on the roster")
        if token != expected:
            raise AuthError(f"bad token for annotator {annotator_id!r}")
        return project

    def create_project(self, payload: dict) -> tuple[str, bool]:
        """Create a project; returns (project_id, created?).

        Idempotent: an identical payload with the same client_token
        returns the existing project.
        """
        if not isinstance(payload, dict):
            raise StoreError("project payload must be a JSON object")
        client_token = payload.get("client_token")
        digest = _payload_digest(payload)
        with self._lock:
            if client_token and client_token in self._by_token:
                existing = self._projects[self._by_token[client_token]]
                if existing.payload_digest != digest:
                    raise ConflictError(
                        "client_token already used with a different payload",
                        {"project_id": existing.project_id})
                return existing.project_id, False

            layer = payload.get("layer", "diagnostic")
            if layer not in LAYERS:
                raise StoreError(f"layer must be one of {LAYERS}")
            taxonomy_name = payload.get("taxonomy_name", "lqm")
            schema = self.resolve_taxonomy(taxonomy_name)

            segment_records = payload.get("segments")
            if not segment_records:
                raise StoreError("project needs a non-empty segment list")
            segments = read_segments("".join(
                json.dumps(rec, ensure_ascii=False) + "\n"
                for rec in segment_records))
            corpus = Corpus(segments)

            roster_records = payload.get("roster")
            if not roster_records:
                raise StoreError("project needs a non-empty annotator roster")
            roster: dict[str, str] = {}
            for rec in roster_records:
                annotator_id = str(rec.get("annotator_id", ""))
                token = str(rec.get("token", ""))
                if not annotator_id or not token:
                    raise StoreError("roster entries need annotator_id and token")
                if annotator_id in roster:
                    raise StoreError(f"duplicate annotator {annotator_id!r}")
                roster[annotator_id] = token

            overlap = float(payload.get("overlap_fraction", 0.0))
            if not 0.0 <= overlap <= 1.0:
                raise StoreError("overlap_fraction must be within [0, 1]")
            assignments = self._assign(
                [s.segment_id for s in segments], list(roster), overlap)

            project_id = uuid.uuid4().hex[:12]
            project = Project(
                project_id=project_id,
                taxonomy_name=taxonomy_name,
                layer=layer,
                client_token=client_token,
                payload_digest=digest,
                roster=roster,
                assignments=assignments,
                corpus=corpus,
                schema=schema,
            )
            directory = self.root / project_id
            directory.mkdir(parents=True)
            _write_durable(directory / "segments.jsonl",
                           write_segments(corpus))
            _write_durable(directory / "project.json", json.dumps({
                "project_id": project_id,
                "taxonomy_name": taxonomy_name,
                "layer": layer,
                "client_token": client_token,
                "payload_digest": digest,
                "roster": roster,
                "assignments": assignments,
            }, ensure_ascii=False, indent=2))
            (directory / "log.jsonl").touch()
            self._projects[project_id] = project
            if client_token:
                self._by_token[client_token] = project_id
            return project_id, True

    @staticmethod
    def _assign(segment_ids: list[str], annotators: list[str],
                overlap: float) -> dict[str, list[str]]:
        """First round(overlap*N) segments go to everyone, the rest
        round-robin across the roster."""
        shared_n = round(overlap * len(segment_ids))
        shared = segment_ids[:shared_n]
        assignments = {a: list(shared) for a in annotators}
        for index, sid in enumerate(segment_ids[shared_n:]):
            assignments[annotators[index % len(annotators)]].append(sid)
        return assignments

    def next_segment(self, project_id: str, annotator_id: str) -> dict:
        with self._lock:
            project = self._project(project_id)
            assigned = project.assignments.get(annotator_id)
            if assigned is None:
                raise NotFoundError(
                    f"annotator {annotator_id!r} is not on the roster")
            done = sum(
                1 for sid in assigned
                if project.slots.get((sid, annotator_id), Slot()).version > 0)
            for position, sid in enumerate(assigned):
                slot = project.slots.get((sid, annotator_id), Slot())
                if slot.version == 0:
                    segment = project.corpus.by_id[sid]
                    return {
                        "complete": False,
                        "segment": segment_to_record(segment),
                        "spans": list(slot.spans),
                        "note": slot.note,
                        "version": slot.version,
                        "position": position,
                        "assigned": len(assigned),
                        "done": done,
                    }
            return {"complete": True, "assigned": len(assigned), "done": done}

    def save_annotation(self, project_id: str, segment_id: str,
                        annotator_id: str, spans: list[dict],
                        note: str | None, expected_version: int) -> int:
        """Atomically replace one (segment, annotator) span set.

        Durable before the new version is returned; raises ConflictError
        with the current state on a version mismatch, and StoreError
        (storing nothing) on validation failure.
        """
        with self._lock:
            project = self._project(project_id)
            if annotator_id not in project.roster:
                raise NotFoundError(
                    f"annotator {annotator_id!r} is not on the roster")
            if segment_id not in project.corpus:
                raise NotFoundError(f"unknown segment {segment_id!r}")
            if segment_id not in project.assignments.get(annotator_id, []):
                raise StoreError(
                    f"segment {segment_id!r} is not assigned to "
                    f"{annotator_id!r}")
            slot = project.slot(segment_id, annotator_id)
            if expected_version != slot.version:
                raise ConflictError(
                    f"version conflict on {segment_id!r}: expected "
                    f"{expected_version}, stored {slot.version}",
                    current={"version": slot.version,
                             "spans": list(slot.spans),
                             "note": slot.note})

            segment = project.corpus.by_id[segment_id]
            validated: list[dict] = []
            seen: set[str] = set()
            for rec in spans:
                span, span_text = span_from_record(dict(rec))
                if span.segment_id != segment_id:
                    raise StoreError(
                        f"span {span.span_id!r} targets segment "
                        f"{span.segment_id!r}, not {segment_id!r}")
                if span.annotator_id != annotator_id:
                    raise StoreError(
                        f"span {span.span_id!r} carries annotator "
                        f"{span.annotator_id!r}, not {annotator_id!r}")
                if span.span_id in seen:
                    raise StoreError(f"duplicate span_id {span.span_id!r}")
                seen.add(span.span_id)
                validate_span_against(span, segment, project.schema, span_text)
                completeness = project.schema.validate_path(span.path)
                if project.layer == "diagnostic" and not completeness.diagnostic_complete:
                    raise StoreError(
                        f"span {span.span_id!r}: path is not "
                        f"diagnostic-complete")
                if project.layer == "lightweight" and not completeness.lightweight_complete:
                    raise StoreError(
                        f"span {span.span_id!r}: path is not "
                        f"lightweight-complete")
                validated.append(span_to_record(span))

            new_version = slot.version + 1
            record = {
                "segment_id": segment_id,
                "annotator_id": annotator_id,
                "version": new_version,
                "spans": validated,
                "note": note,
            }
            handle = self._log_handle(project_id)
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            handle.flush()
            os.fsync(handle.fileno())

            slot.version = new_version
            slot.spans = validated
            slot.note = note
            project.saves_applied += 1
            if project.saves_applied % self.snapshot_every == 0:
                self._write_snapshot(project)
            return new_version

    def _write_snapshot(self, project: Project) -> None:
        slots = {
            f"{sid}\x00{aid}": slot.to_dict()
            for (sid, aid), slot in sorted(project.slots.items())
        }
        _write_durable(self.root / project.project_id / "snapshot.json",
                       json.dumps({"saves_applied": project.saves_applied,
                                   "slots": slots}, ensure_ascii=False))

    def export_project(self, project_id: str) -> tuple[str, str]:
        """(segments.jsonl, annotations.jsonl) content; byte-stable."""
        with self._lock:
            project = self._project(project_id)
            segments_out = write_segments(project.corpus)
            order = {s.segment_id: i for i, s in enumerate(project.corpus)}
            lines = []
            for (sid, aid), slot in sorted(
                    project.slots.items(),
                    key=lambda item: (order[item[0][0]], item[0][1])):
                for rec in slot.spans:
                    lines.append(json.dumps(rec, ensure_ascii=False))
            return segments_out, "".join(line + "\n" for line in lines)

    def progress(self, project_id: str) -> dict:
        with self._lock:
            project = self._project(project_id)
            out = []
            for annotator_id in sorted(project.roster):
                assigned = project.assignments.get(annotator_id, [])
                done = spans = flagged = 0
                for sid in assigned:
                    slot = project.slots.get((sid, annotator_id))
                    if slot is None or slot.version == 0:
                        continue
                    done += 1
                    spans += len(slot.spans)
                    if slot.note:
                        flagged += 1
                out.append({
                    "annotator_id": annotator_id,
                    "assigned": len(assigned),
                    "done": done,
                    "spans": spans,
                    "flagged": flagged,
                })
            return {"annotators": out}

    def project_info(self, project_id: str) -> dict:
        with self._lock:
            project = self._project(project_id)
            return {
                "project_id": project.project_id,
                "taxonomy_name": project.taxonomy_name,
                "layer": project.layer,
                "n_segments": len(project.corpus),
                "annotators": sorted(project.roster),
            }
