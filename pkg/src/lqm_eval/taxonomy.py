"""Hierarchical error taxonomies: loading, validation, and path queries.

A taxonomy is a forest of at most three levels: category (depth 1),
error type (depth 2), and subcategory (depth 3).  Depths 1-2 form the
lightweight annotation layer; leaves (any depth) form the diagnostic
layer.  A node above depth 3 with no children is annotatable in both
layers.

Taxonomy file format (one record per node, blank-line separated):

    # comment
    name: LQM
    version: 1.0
    levels: sociolinguistics, pragmatics, ...

    node: <id>
    label: <human label>
    depth: <1|2|3>
    parent: <id of parent; omit or leave empty for categories>
    definition: <one line>

Header directives must precede the first ``node:`` record.  Ids must be
unique; parents may be declared in any order.  The built-in schemas
``lqm`` and ``mqm`` ship with the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .errors import TaxonomyError

LIGHTWEIGHT = "lightweight"
DIAGNOSTIC = "diagnostic"
LAYERS = (LIGHTWEIGHT, DIAGNOSTIC)

BUILTIN_NAMES = ("lqm", "mqm")

_MAX_DEPTH = 3
_NODE_KEYS = {"node", "label", "depth", "parent", "definition"}


@dataclass
class TaxonomyNode:
    id: str
    label: str
    definition: str
    depth: int
    parent: str | None = None
    children: list["TaxonomyNode"] = field(default_factory=list)

    @property
    def layer(self) -> str:
        return DIAGNOSTIC if self.depth == _MAX_DEPTH else LIGHTWEIGHT

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class TaxonomyPath:
    """A category / error-type / subcategory chain of node ids."""

    category: str
    error_type: str | None = None
    subcategory: str | None = None

    def ids(self) -> tuple[str, ...]:
        out = [self.category]
        if self.error_type is not None:
            out.append(self.error_type)
        if self.subcategory is not None:
            out.append(self.subcategory)
        return tuple(out)

    @property
    def deepest(self) -> str:
        return self.ids()[-1]

    @classmethod
    def from_ids(cls, ids) -> "TaxonomyPath":
        ids = list(ids)
        if not 1 <= len(ids) <= 3:
            raise TaxonomyError(f"a taxonomy path needs 1-3 ids, got {ids!r}")
        return cls(*(ids + [None] * (3 - len(ids))))


@dataclass(frozen=True)
class PathValidation:
    valid: bool
    lightweight_complete: bool
    diagnostic_complete: bool
    problem: str | None = None


class TaxonomySchema:
    """Validated, immutable taxonomy. Safe to share across threads."""

    def __init__(self, name: str, version: str, levels: list[str],
                 roots: list[TaxonomyNode]):
        self.name = name
        self.version = version
        self.levels = list(levels)
        self.roots = roots
        self._by_id: dict[str, TaxonomyNode] = {}
        for node in self._walk():
            self._by_id[node.id] = node

    def _walk(self):
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def node(self, node_id: str) -> TaxonomyNode:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise TaxonomyError(
                f"unknown taxonomy node {node_id!r} in schema {self.name!r}"
            ) from None

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def path_for(self, node_id: str) -> TaxonomyPath:
        """Full chain from root down to the given node."""
        node = self.node(node_id)
        chain = [node.id]
        while node.parent is not None:
            node = self._by_id[node.parent]
            chain.append(node.id)
        return TaxonomyPath.from_ids(reversed(chain))

    def validate_path(self, path: TaxonomyPath) -> PathValidation:
        """Check ids exist and chain parent-to-child; report completeness."""
        ids = path.ids()
        for node_id in ids:
            if node_id not in self._by_id:
                return PathValidation(False, False, False,
                                      f"unknown node id {node_id!r}")
        for parent_id, child_id in zip(ids, ids[1:]):
            child = self._by_id[child_id]
            if child.parent != parent_id:
                return PathValidation(
                    False, False, False,
                    f"{child_id!r} is not a child of {parent_id!r}")
        deepest = self._by_id[ids[-1]]
        if deepest.depth != len(ids):
            # e.g. a depth-2 id passed in the category slot
            return PathValidation(
                False, False, False,
                f"{deepest.id!r} has depth {deepest.depth}, "
                f"given at position {len(ids)}")
        light = deepest.depth >= 2 or deepest.is_leaf
        diag = deepest.is_leaf
        return PathValidation(True, light, diag)

    def enumerate_leaves(self, layer: str) -> list[TaxonomyPath]:
        """Annotatable paths for a layer, in document order."""
        if layer not in LAYERS:
            raise TaxonomyError(f"unknown layer {layer!r}; expected one of {LAYERS}")
        paths = []
        for node in self._walk():
            if layer == LIGHTWEIGHT:
                take = node.depth == 2 or (node.depth == 1 and node.is_leaf)
            else:
                take = node.is_leaf
            if take:
                paths.append(self.path_for(node.id))
        return paths

    def to_dict(self) -> dict:
        def node_dict(n: TaxonomyNode) -> dict:
            return {
                "id": n.id,
                "label": n.label,
                "definition": n.definition,
                "depth": n.depth,
                "layer": n.layer,
                "children": [node_dict(c) for c in n.children],
            }

        return {
            "name": self.name,
            "version": self.version,
            "levels": list(self.levels),
            "nodes": [node_dict(r) for r in self.roots],
        }


def _parse_records(source: str):
    """Split file content into a header dict and raw node records."""
    header: dict[str, str] = {}
    records: list[tuple[int, dict[str, str]]] = []
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise TaxonomyError(f"line {lineno}: expected 'key: value', got {line!r}")
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()
        if key == "node":
            if not value:
                raise TaxonomyError(f"line {lineno}: node record without an id")
            current = {"node": value}
            records.append((lineno, current))
        elif current is None:
            header[key] = value
        else:
            if key not in _NODE_KEYS:
                raise TaxonomyError(
                    f"line {lineno}: unknown field {key!r} in node "
                    f"{current['node']!r}")
            current[key] = value
    return header, records


def load_taxonomy(source: str, *, name: str | None = None) -> TaxonomySchema:
    """Parse taxonomy file content into a validated TaxonomySchema.

    Raises TaxonomyError naming the offending node on duplicate ids,
    orphans, bad depths, or cycles.
    """
    header, records = _parse_records(source)
    if not records:
        raise TaxonomyError("taxonomy file declares no nodes")

    nodes: dict[str, TaxonomyNode] = {}
    order: list[str] = []
    for lineno, rec in records:
        node_id = rec["node"]
        if node_id in nodes:
            raise TaxonomyError(f"line {lineno}: duplicate node id {node_id!r}")
        try:
            depth = int(rec.get("depth", ""))
        except ValueError:
            raise TaxonomyError(
                f"line {lineno}: node {node_id!r} has no integer depth") from None
        if not 1 <= depth <= _MAX_DEPTH:
            raise TaxonomyError(
                f"node {node_id!r}: depth {depth} outside 1..{_MAX_DEPTH}")
        parent = rec.get("parent", "") or None
        nodes[node_id] = TaxonomyNode(
            id=node_id,
            label=rec.get("label", node_id),
            definition=rec.get("definition", ""),
            depth=depth,
            parent=parent,
        )
        order.append(node_id)

    roots = []
    for node_id in order:
        node = nodes[node_id]
        if node.parent is None:
            if node.depth != 1:
                raise TaxonomyError(
                    f"node {node_id!r}: depth {node.depth} but no parent")
            roots.append(node)
            continue
        if node.parent == node.id:
            raise TaxonomyError(f"node {node_id!r}: cycle (lists itself)")
        if node.parent not in nodes:
            raise TaxonomyError(
                f"node {node_id!r}: orphan, parent {node.parent!r} not defined")
        parent = nodes[node.parent]
        if node.depth != parent.depth + 1:
            raise TaxonomyError(
                f"node {node_id!r}: depth {node.depth} under parent "
                f"{parent.id!r} of depth {parent.depth}")
        parent.children.append(node)

    # Parent pointers with consistent depths cannot loop back except through
    # a node that is its own ancestor at equal depth; detect explicitly.
    for node_id in order:
        seen = set()
        cur = nodes[node_id]
        while cur.parent is not None:
            if cur.id in seen:
                raise TaxonomyError(f"node {node_id!r}: cycle via {cur.id!r}")
            seen.add(cur.id)
            cur = nodes[cur.parent]

    reachable = set()
    stack = [r.id for r in roots]
    while stack:
        nid = stack.pop()
        reachable.add(nid)
        stack.extend(c.id for c in nodes[nid].children)
    stranded = [nid for nid in order if nid not in reachable]
    if stranded:
        raise TaxonomyError(f"node {stranded[0]!r}: not reachable from any category")

    levels = [s.strip() for s in header.get("levels", "").split(",") if s.strip()]
    root_ids = [r.id for r in roots]
    if levels and levels != root_ids:
        raise TaxonomyError(
            f"levels header {levels!r} does not match categories {root_ids!r}")
    return TaxonomySchema(
        name=name or header.get("name", "unnamed"),
        version=header.get("version", "0"),
        levels=levels or root_ids,
        roots=roots,
    )


def serialize_taxonomy(schema: TaxonomySchema) -> str:
    """Render a schema back to the file format (load round-trips)."""
    lines = [
        f"name: {schema.name}",
        f"version: {schema.version}",
        f"levels: {', '.join(schema.levels)}",
    ]
    for node in schema._walk():
        lines.append("")
        lines.append(f"node: {node.id}")
        lines.append(f"label: {node.label}")
        lines.append(f"depth: {node.depth}")
        if node.parent is not None:
            lines.append(f"parent: {node.parent}")
        lines.append(f"definition: {node.definition}")
    return "\n".join(lines) + "\n"


def builtin_taxonomy_source(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise TaxonomyError(
            f"no built-in taxonomy {name!r}; available: {', '.join(BUILTIN_NAMES)}")
    return (resources.files("lqm_eval.data") / f"{name}.taxonomy").read_text("utf-8")


def load_builtin(name: str = "lqm") -> TaxonomySchema:
    return load_taxonomy(builtin_taxonomy_source(name))
