"""One object bundling everything a computation over a fixed group needs."""

from __future__ import annotations

from .coxeter import ChoiceLedger, CoxeterSystem, GroupUniverse
from .hecke import KLTable
from .invring import RingContext
from .bsbim import Bimodules


class Session:
    """Group, ball of elements, ledger, polynomial ring and morphism caches.

    Trees of light leaves are cached per (word, self_identity).
    """

    def __init__(self, system: CoxeterSystem, max_length: int, seed: int = 0, cap=None):
        self.system = system
        self.universe = GroupUniverse(system, max_length, cap)
        self.ledger = ChoiceLedger(self.universe, seed)
        self.ring = RingContext(system)
        self.bims = Bimodules(self.ring)
        self.d = system.d
        self._kl = None
        self._trees: dict = {}

    @classmethod
    def for_group(cls, group: str, max_length: int, seed: int = 0, field: str = "auto"):
        return cls(CoxeterSystem.resolve(group, field), max_length, seed)

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    @property
    def kl(self) -> KLTable:
        if self._kl is None:
            self._kl = KLTable(self.universe)
        return self._kl

    def parse_word(self, text) -> tuple:
        return self.system.parse_word(text)

    def element(self, word) -> int:
        return self.universe.element(word)

    def fmt(self, x: int) -> str:
        """Canonical printable name of an element."""
        return self.system.format_word(self.universe.words[x])

    def tree(self, word, self_identity: bool = True):
        from .leaves import LeafTree

        key = (tuple(word), self_identity)
        hit = self._trees.get(key)
        if hit is None:
            hit = LeafTree(self, tuple(word), self_identity=self_identity)
            self._trees[key] = hit
        return hit
