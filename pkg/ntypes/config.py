"""Budget configuration for the ntypes kernel."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import replace
from typing import Any

import voluptuous as vol

from .const import DEFAULT_COSET_LIMIT
from .const import DEFAULT_DIM_BOUND
from .const import DEFAULT_HOM_ORDER
from .const import DEFAULT_SEARCH_NODES
from .const import DEFAULT_WORD_LENGTH
from .exceptions import DimBudgetExceeded
from .exceptions import MalformedSpec

_POSITIVE = vol.All(int, vol.Range(min=1))

BUDGET_SCHEMA = vol.Schema(
    {
        vol.Optional("dim_bound"): _POSITIVE,
        vol.Optional("search_nodes"): _POSITIVE,
        vol.Optional("coset_limit"): _POSITIVE,
        vol.Optional("hom_order"): _POSITIVE,
        vol.Optional("word_length"): vol.All(int, vol.Range(min=0)),
    }
)


@dataclass(frozen=True)
class Budget:
    """Resource limits shared by every bounded computation."""

    dim_bound: int = DEFAULT_DIM_BOUND
    search_nodes: int = DEFAULT_SEARCH_NODES
    coset_limit: int = DEFAULT_COSET_LIMIT
    hom_order: int = DEFAULT_HOM_ORDER
    word_length: int = DEFAULT_WORD_LENGTH

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> Budget:
        """Create a Budget from user overrides.

        Args:
            data: Mapping with any subset of the budget fields.

        Returns:
            Budget instance.

        Raises:
            MalformedSpec: If a key is unknown or a value is not a valid count.
        """
        try:
            checked = BUDGET_SCHEMA(dict(data))
        except vol.Invalid as err:
            raise MalformedSpec(f"Invalid budget: {err}") from err
        return replace(cls(), **checked)

    def as_dict(self) -> dict[str, int]:
        """Return the budget as a plain dictionary."""
        return asdict(self)

    def check_dim(self, max_dim: int) -> None:
        """Raise if max_dim exceeds the dimension bound.

        Args:
            max_dim: Requested dimension.

        Raises:
            DimBudgetExceeded: If max_dim is above dim_bound.
        """
        if max_dim > self.dim_bound:
            raise DimBudgetExceeded(
                f"Dimension {max_dim} exceeds bound {self.dim_bound}",
                requested=max_dim,
                bound=self.dim_bound,
            )


def resolve(budget: Budget | None) -> Budget:
    """Return budget, or the default budget when None."""
    return budget if budget is not None else Budget()
