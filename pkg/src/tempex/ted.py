"""Unit-cost ordered tree edit distance (Zhang & Shasha, 1989) over node tags."""

from __future__ import annotations

from .dom import DomTree


def _annotate(tree: DomTree, root: int) -> tuple[list[str], list[int], list[int]]:
    """Postorder labels, leftmost-leaf indices and keyroots of a subtree."""
    labels: list[str] = []
    lml: list[int] = []
    nodes = tree.nodes

    def visit(n: int) -> int:
        kids = nodes[n].children
        first = None
        for c in kids:
            leftmost = visit(c)
            if first is None:
                first = leftmost
        idx = len(labels)
        labels.append(nodes[n].tag)
        lml.append(idx if first is None else first)
        return lml[idx]

    visit(root)
    seen: dict[int, int] = {}
    for i, l in enumerate(lml):
        seen[l] = i  # highest postorder index per leftmost leaf
    keyroots = sorted(seen.values())
    return labels, lml, keyroots


def tree_edit_distance(tree_a: DomTree, a: int, tree_b: DomTree | None = None, b: int | None = None) -> int:
    """Edit distance between the subtree of ``a`` and the subtree of ``b``.

    ``tree_b`` defaults to ``tree_a``. Insert, delete and relabel cost 1.
    """
    if tree_b is None:
        tree_b = tree_a
    if b is None:
        raise TypeError("second node required")
    la, ma, ka = _annotate(tree_a, a)
    lb, mb, kb = _annotate(tree_b, b)
    na, nb = len(la), len(lb)
    td = [[0] * nb for _ in range(na)]
    for i in ka:
        for j in kb:
            li, lj = ma[i], mb[j]
            rows, cols = i - li + 2, j - lj + 2
            fd = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = x
            for y in range(1, cols):
                fd[0][y] = y
            for x in range(1, rows):
                ix = li + x - 1
                fx, fx1 = fd[x], fd[x - 1]
                for y in range(1, cols):
                    jy = lj + y - 1
                    if ma[ix] == li and mb[jy] == lj:
                        cost = 0 if la[ix] == lb[jy] else 1
                        v = min(fx1[y] + 1, fx[y - 1] + 1, fx1[y - 1] + cost)
                        fx[y] = v
                        td[ix][jy] = v
                    else:
                        p = ma[ix] - li
                        q = mb[jy] - lj
                        fx[y] = min(fx1[y] + 1, fx[y - 1] + 1, fd[p][q] + td[ix][jy])
    return td[na - 1][nb - 1]


def normalized_edit_distance(tree_a: DomTree, a: int, tree_b: DomTree | None = None, b: int | None = None) -> float:
    """Edit distance divided by ``size(a) + size(b)``, the cost of deleting one and inserting the other."""
    if tree_b is None:
        tree_b = tree_a
    d = tree_edit_distance(tree_a, a, tree_b, b)
    return d / (tree_a.size(a) + tree_b.size(b))


class EditDistanceCache:
    """Memoizes normalized distances by subtree shape within one tree."""

    def __init__(self, tree: DomTree):
        self.tree = tree
        self._memo: dict[tuple[int, int], float] = {}

    def __call__(self, a: int, b: int) -> float:
        sa, sb = self.tree.signature(a), self.tree.signature(b)
        if sa == sb:
            return 0.0
        key = (sa, sb) if sa < sb else (sb, sa)
        d = self._memo.get(key)
        if d is None:
            d = normalized_edit_distance(self.tree, a, self.tree, b)
            self._memo[key] = d
        return d
