"""In-memory filesystem with creation-ordered directory entries.

Directory entries keep creation order: deleting and re-creating a name
appends it at the end, and enumerating a directory yields names oldest
first. File bodies are flat byte buffers with no inode identity beyond
their tree position; truncation rewrites the buffer in place, so byte
offsets held by stream readers stay meaningful across a truncate+append.

Paths are purely lexical, `/`-separated, resolved against a base
directory handle. `.` components are skipped; `..` is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

NAME_MAX = 255


class VfsError(Exception):
    """Base class for filesystem failures."""


class MissingParent(VfsError):
    pass


class AlreadyExists(VfsError):
    pass


class NotADirectory(VfsError):
    pass


class IsADirectory(VfsError):
    pass


class NotFound(VfsError):
    pass


class DirNotEmpty(VfsError):
    pass


class NameTooLong(VfsError):
    pass


class BadPath(VfsError):
    """Path is lexically unsupported (`..`, NUL bytes, empty name)."""


class Dir:
    __slots__ = ("entries",)

    def __init__(self) -> None:
        self.entries: dict[str, Node] = {}


class File:
    __slots__ = ("content",)

    def __init__(self, content: bytes = b"") -> None:
        self.content = bytearray(content)


Node = Dir | File


@dataclass(frozen=True)
class Stat:
    kind: str  # "dir" | "file"
    size: int | None  # None for directories: a directory has no file size


def _check_name(name: str) -> None:
    if not name or "/" in name or "\0" in name:
        raise BadPath(f"invalid entry name: {name!r}")
    if len(name.encode("utf-8")) > NAME_MAX:
        raise NameTooLong(f"entry name longer than {NAME_MAX} bytes")


def split_path(path: str) -> list[str]:
    """Split into components, dropping `.` and empty parts; reject `..`."""
    comps = []
    for part in path.split("/"):
        if part in ("", "."):
            continue
        if part == "..":
            raise BadPath(f"'..' is not supported: {path!r}")
        if "\0" in part:
            raise BadPath(f"NUL byte in path: {path!r}")
        comps.append(part)
    return comps


def lookup(base: Dir, path: str) -> Node | None:
    """Resolve `path` against `base`; None when any component is missing."""
    node: Node = base
    for comp in split_path(path):
        if not isinstance(node, Dir):
            return None
        nxt = node.entries.get(comp)
        if nxt is None:
            return None
        node = nxt
    return node


def _walk_parent(base: Dir, comps: list[str]) -> Dir:
    node: Node = base
    for comp in comps:
        if not isinstance(node, Dir):
            raise NotADirectory(f"{comp!r} reached through a non-directory")
        nxt = node.entries.get(comp)
        if nxt is None:
            raise MissingParent(f"missing parent directory {comp!r}")
        node = nxt
    if not isinstance(node, Dir):
        raise NotADirectory("parent is not a directory")
    return node


def mkdir(base: Dir, path: str, parents: bool = False) -> None:
    """Create a directory; with parents=True also create missing ancestors.

    With parents=True the call is idempotent: an already existing directory
    chain is accepted. Without it the parent must exist and the target must
    not.
    """
    comps = split_path(path)
    if not comps:
        raise AlreadyExists(f"cannot create directory {path!r}")
    if parents:
        node: Node = base
        for comp in comps:
            if not isinstance(node, Dir):
                raise NotADirectory(f"{path!r}: component is not a directory")
            nxt = node.entries.get(comp)
            if nxt is None:
                _check_name(comp)
                nxt = Dir()
                node.entries[comp] = nxt
            node = nxt
        if not isinstance(node, Dir):
            raise NotADirectory(f"{path!r}: exists and is not a directory")
        return
    parent = _walk_parent(base, comps[:-1])
    name = comps[-1]
    if name in parent.entries:
        raise AlreadyExists(f"cannot create directory {path!r}: exists")
    _check_name(name)
    parent.entries[name] = Dir()


def write(base: Dir, path: str, data: bytes, append: bool = False) -> None:
    """Write bytes to a file, creating it if needed.

    Without append the content is replaced in place (the node keeps its
    identity, so reader offsets into it remain valid); with append the
    bytes are added at the end.
    """
    comps = split_path(path)
    if not comps:
        raise IsADirectory(f"cannot write to {path!r}")
    parent = _walk_parent(base, comps[:-1])
    name = comps[-1]
    node = parent.entries.get(name)
    if node is None:
        _check_name(name)
        parent.entries[name] = File(data)
        return
    if isinstance(node, Dir):
        raise IsADirectory(f"{path!r} is a directory")
    if append:
        node.content.extend(data)
    else:
        node.content = bytearray(data)


def read_at(base: Dir, path: str, offset: int = 0) -> bytes:
    """Return the file's bytes from `offset` to the end (empty past EOF)."""
    node = lookup(base, path)
    if node is None:
        raise NotFound(f"{path!r}: no such file")
    if isinstance(node, Dir):
        raise IsADirectory(f"{path!r} is a directory")
    return bytes(node.content[offset:])


def delete(base: Dir, path: str) -> None:
    """Remove a file or empty directory from its parent's ordered entries."""
    comps = split_path(path)
    if not comps:
        raise BadPath(f"cannot delete {path!r}")
    try:
        parent = _walk_parent(base, comps[:-1])
    except (MissingParent, NotADirectory):
        raise NotFound(f"{path!r}: no such entry") from None
    name = comps[-1]
    node = parent.entries.get(name)
    if node is None:
        raise NotFound(f"{path!r}: no such entry")
    if isinstance(node, Dir) and node.entries:
        raise DirNotEmpty(f"{path!r}: directory not empty")
    del parent.entries[name]


def children(d: Dir) -> list[str]:
    """Snapshot of entry names in creation order."""
    return list(d.entries)


def stat(base: Dir, path: str) -> Stat | None:
    node = lookup(base, path)
    if node is None:
        return None
    if isinstance(node, Dir):
        return Stat("dir", None)
    return Stat("file", len(node.content))


def dump(d: Dir) -> str:
    """Debug dump: one line per node, depth-indented, children in creation order."""
    lines: list[str] = []
    stack: list[tuple[str, Node, int]] = [
        (name, node, 0) for name, node in reversed(d.entries.items())
    ]
    while stack:
        name, node, depth = stack.pop()
        pad = "  " * depth
        if isinstance(node, Dir):
            lines.append(f"{pad}D {name}/")
            stack.extend(
                (n, c, depth + 1) for n, c in reversed(node.entries.items())
            )
        else:
            lines.append(f"{pad}F {name} {len(node.content)}B")
    return "\n".join(lines)
