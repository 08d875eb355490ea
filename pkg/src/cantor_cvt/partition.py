"""Contiguous block partitions of the cylinder index range ``1..N``."""

from dataclasses import dataclass, field

from .errors import PartitionMismatch


@dataclass(frozen=True)
class BlockPartition:
    """``n`` contiguous blocks tiling ``1..size``.

    ``boundaries`` holds the interior cut indices ``i_1 < ... < i_{n-1}``;
    block ``l`` (0-based) is ``[i_l + 1, i_{l+1}]`` with ``i_0 = 0`` and
    ``i_n = size``. All indices are 1-based, matching the cylinder
    numbering of :class:`~cantor_cvt.ifs_model.CylinderTable`.
    """

    size: int
    boundaries: tuple = ()
    level: int = field(default=None, compare=False)

    def __post_init__(self):
        b = tuple(int(x) for x in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        if self.size < 1:
            raise PartitionMismatch(f"partition size must be positive, got {self.size}")
        prev = 0
        for x in b:
            if not prev < x < self.size:
                raise PartitionMismatch(
                    f"boundaries {b} are not strictly increasing inside 1..{self.size - 1}"
                )
            prev = x

    @classmethod
    def from_blocks(cls, blocks, level=None):
        """Build from 1-based ``(start, end)`` pairs, e.g. ``[(1, 1), (2, 2), (3, 4)]``."""
        blocks = [tuple(b) for b in blocks]
        if not blocks:
            raise PartitionMismatch("no blocks given")
        expected = 1
        for start, end in blocks:
            if start != expected or end < start:
                raise PartitionMismatch(f"blocks {blocks} do not tile 1..N contiguously")
            expected = end + 1
        return cls(size=blocks[-1][1], boundaries=tuple(e for _, e in blocks[:-1]), level=level)

    @property
    def n(self):
        return len(self.boundaries) + 1

    @property
    def cuts(self):
        """Boundaries padded with ``0`` and ``size``."""
        return (0,) + self.boundaries + (self.size,)

    @property
    def blocks(self):
        c = self.cuts
        return [(c[k] + 1, c[k + 1]) for k in range(self.n)]

    def __str__(self):
        return "{" + ", ".join(f"[{a}, {b}]" for a, b in self.blocks) + "}"
