"""Implements generic dissipator."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING

from modules.operator_core import HilbertLayout, Operator, embed

if TYPE_CHECKING:
    from scipy import sparse

    from modules.typing import ComplexArray


@dataclass(frozen=True, kw_only=True)
class _DissipatorGeneric(ABC):
    """Generic abstract dissipator acting on one subsystem (or one pair of target levels) of a layout.

    Concrete dissipators produce their full d² × d² vectorised generator; restriction to an energy
    support happens when generators are summed up.
    """

    layout: HilbertLayout
    index: int
    rate: float

    def __post_init__(self) -> None:
        self.layout.ensure_index(self.index)
        if self.rate < 0:
            raise ValueError(f"negative dissipation rate {self.rate}")

    def lift(self, local: Operator) -> ComplexArray:
        """Embeds a local operator on subsystem `index`."""
        return embed(local, self.index, self.layout).matrix

    @property
    def local_dim(self) -> int:
        return self.layout.dims[self.index]

    @abstractmethod
    def generator(self) -> sparse.csr_array:
        """Vectorised generator, rate included."""
