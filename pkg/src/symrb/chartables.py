"""Hard-coded character tables of the symmetric groups S_1..S_4.

Classes are keyed by cycle type (partition of k, sorted descending).
Products of symmetric groups get tensor-product tables; this covers every
stabilizer subgroup arising for up to four identical local factors.
"""

from __future__ import annotations

import numpy as np

# cycle type -> column order per group; values per irrep name
SYMMETRIC_TABLES: dict[int, dict] = {
    1: {
        "classes": [(1,)],
        "irreps": {"e": [1]},
    },
    2: {
        "classes": [(1, 1), (2,)],
        "irreps": {"e": [1, 1], "sgn": [1, -1]},
    },
    3: {
        "classes": [(1, 1, 1), (2, 1), (3,)],
        "irreps": {"e": [1, 1, 1], "sgn": [1, -1, 1], "std": [2, 0, -1]},
    },
    4: {
        "classes": [(1, 1, 1, 1), (2, 1, 1), (2, 2), (3, 1), (4,)],
        "irreps": {
            "e": [1, 1, 1, 1, 1],
            "sgn": [1, -1, 1, 1, -1],
            "2dim": [2, 0, 2, -1, 0],
            "std": [3, 1, -1, 0, -1],
            "std_sgn": [3, -1, -1, 0, 1],
        },
    },
}


def cycle_type(perm: tuple[int, ...], positions: tuple[int, ...]) -> tuple[int, ...]:
    """Cycle type of a permutation restricted to a cell it preserves."""
    pos = set(positions)
    assert all(perm[p] in pos for p in positions)
    seen: set[int] = set()
    lengths = []
    for p in positions:
        if p in seen:
            continue
        length = 0
        q = p
        while q not in seen:
            seen.add(q)
            q = perm[q]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def product_irrep_name(cell_names: tuple[str, ...], cell_sizes: tuple[int, ...]) -> str:
    """Readable label for a tensor-product irrep of a product of symmetric groups."""
    nontrivial = [(name, size) for name, size in zip(cell_names, cell_sizes) if size > 1]
    if all(name == "e" for name, _ in nontrivial) or not nontrivial:
        return "e"
    if len(nontrivial) == 1:
        return nontrivial[0][0]
    names = [name for name, _ in nontrivial]
    if all(n == "sgn" for n in names):
        return "sgn"
    # Klein-four style mixed labels: one sgn factor per kernel direction
    if set(names) <= {"e", "sgn"} and len(names) == 2:
        return "ker_a" if names == ["sgn", "e"] else "ker_b"
    return "x".join(names)


class ProductSymmetricTable:
    """Character table of a product of symmetric groups, one factor per cell.

    Elements are permutations of the ambient positions preserving every
    cell; classes are tuples of per-cell cycle types.
    """

    def __init__(self, cells: list[tuple[int, ...]]):
        for cell in cells:
            if len(cell) > 4:
                raise NotImplementedError("symmetric groups beyond S_4 are out of scope")
        self.cells = cells
        self.cell_sizes = tuple(len(c) for c in cells)
        base = [SYMMETRIC_TABLES[len(c)] for c in cells]
        self.class_keys: list[tuple] = []
        self._class_index: dict[tuple, int] = {}
        import itertools
        for combo in itertools.product(*[t["classes"] for t in base]):
            self._class_index[tuple(combo)] = len(self.class_keys)
            self.class_keys.append(tuple(combo))
        self.irreps: dict[str, np.ndarray] = {}
        self.irrep_dims: dict[str, int] = {}
        for names in itertools.product(*[sorted(t["irreps"]) for t in base]):
            values = np.ones(len(self.class_keys))
            for idx, combo in enumerate(self.class_keys):
                v = 1.0
                for t, name, ct in zip(base, names, combo):
                    v *= t["irreps"][name][t["classes"].index(ct)]
                values[idx] = v
            label = product_irrep_name(tuple(names), self.cell_sizes)
            if label in self.irreps:  # disambiguate rare collisions
                label = "x".join(names)
            self.irreps[label] = values
            self.irrep_dims[label] = int(values[0])

    def class_of(self, perm: tuple[int, ...]) -> int:
        key = tuple(cycle_type(perm, cell) for cell in self.cells)
        return self._class_index[key]
