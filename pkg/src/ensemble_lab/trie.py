"""Prefix trie over symbol tuples."""

from __future__ import annotations

from typing import Iterable, Iterator

_END = object()


class PrefixTrie:
    def __init__(self, strings: Iterable[tuple[str, ...]] = ()):
        self._root: dict = {}
        self._size = 0
        for s in strings:
            self.add(s)

    def add(self, s: tuple[str, ...]) -> None:
        node = self._root
        for a in s:
            node = node.setdefault(a, {})
        if _END not in node:
            node[_END] = True
            self._size += 1

    def __len__(self) -> int:
        return self._size

    def __contains__(self, s) -> bool:
        node = self._root
        for a in s:
            node = node.get(a)
            if node is None:
                return False
        return _END in node

    def has_prefix_of(self, s: Iterable[str]) -> bool:
        """True iff some stored string is a prefix of ``s`` (``s`` included)."""
        node = self._root
        if _END in node:
            return True
        for a in s:
            node = node.get(a)
            if node is None:
                return False
            if _END in node:
                return True
        return False

    def minimal(self) -> Iterator[tuple[str, ...]]:
        """Stored strings with no proper prefix stored, in DFS order."""
        stack = [(self._root, ())]
        while stack:
            node, path = stack.pop()
            if _END in node:
                yield path
                continue
            for a in sorted((k for k in node if k is not _END), reverse=True):
                stack.append((node[a], path + (a,)))

    def is_prefix_free(self) -> bool:
        return sum(1 for _ in self.minimal()) == self._size
