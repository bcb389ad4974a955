"""Binary min-heap over a fixed item set with in-place key updates."""

from __future__ import annotations


class IndexedMinHeap:
    """Min-heap keyed by comparable values, one entry per item id 0..n-1.

    Items are never removed; ``update`` rewrites an item's key and restores
    the heap order by sifting in whichever direction is needed. Keys are
    compared with ``<``, so tuple keys give lexicographic order.
    """

    __slots__ = ("_keys", "_heap", "_pos")

    def __init__(self, keys):
        self._keys = list(keys)
        n = len(self._keys)
        self._heap = list(range(n))
        self._pos = list(range(n))
        for i in range(n // 2 - 1, -1, -1):
            self._sift_down(i)

    def __len__(self):
        return len(self._heap)

    def peek(self):
        """(key, item) with the smallest key."""
        item = self._heap[0]
        return self._keys[item], item

    def key(self, item):
        return self._keys[item]

    def update(self, item, key):
        old = self._keys[item]
        self._keys[item] = key
        pos = self._pos[item]
        if key < old:
            self._sift_up(pos)
        elif old < key:
            self._sift_down(pos)

    def _sift_up(self, pos):
        heap, keys, index = self._heap, self._keys, self._pos
        item = heap[pos]
        key = keys[item]
        while pos > 0:
            parent = (pos - 1) >> 1
            up = heap[parent]
            if not key < keys[up]:
                break
            heap[pos] = up
            index[up] = pos
            pos = parent
        heap[pos] = item
        index[item] = pos

    def _sift_down(self, pos):
        heap, keys, index = self._heap, self._keys, self._pos
        n = len(heap)
        item = heap[pos]
        key = keys[item]
        while True:
            child = 2 * pos + 1
            if child >= n:
                break
            right = child + 1
            if right < n and keys[heap[right]] < keys[heap[child]]:
                child = right
            down = heap[child]
            if not keys[down] < key:
                break
            heap[pos] = down
            index[down] = pos
            pos = child
        heap[pos] = item
        index[item] = pos
