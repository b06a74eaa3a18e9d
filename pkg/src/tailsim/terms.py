"""Reinsurance financial terms: per-event occurrence layer, per-year aggregate layer."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Contract:
    """Occurrence and annual aggregate attachment/limit of an excess-of-loss layer."""

    name: str
    occ_attach: float
    occ_limit: float
    agg_attach: float
    agg_limit: float

    def __post_init__(self):
        if not self.name or any(ch in self.name for ch in ",\n\r"):
            raise DomainError(f"contract name must be non-empty without commas, got {self.name!r}")
        for field in ("occ_attach", "occ_limit", "agg_attach", "agg_limit"):
            value = getattr(self, field)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{self.name}: {field} must be finite and >= 0, got {value}")
        if self.occ_limit <= 0 or self.agg_limit <= 0:
            raise DomainError(f"{self.name}: limits must be > 0")


def _layer(loss, attach, limit, what):
    arr = np.asarray(loss, dtype=np.float64)
    if np.any(arr < 0):
        raise DomainError(f"{what} loss must be >= 0")
    out = np.minimum(np.maximum(0.0, arr - attach), limit)
    return float(out) if arr.ndim == 0 else out


def apply_occurrence(contract, gross):
    """``min(max(0, gross - occ_attach), occ_limit)`` for one event or an array."""
    return _layer(gross, contract.occ_attach, contract.occ_limit, "gross")


def apply_aggregate(contract, annual):
    """``min(max(0, annual - agg_attach), agg_limit)`` on the year's layered sum."""
    return _layer(annual, contract.agg_attach, contract.agg_limit, "annual")


def term_arrays(contracts):
    """Column arrays ``(occ_att, occ_lim, agg_att, agg_lim)`` for the kernels."""
    cols = np.array(
        [[c.occ_attach, c.occ_limit, c.agg_attach, c.agg_limit] for c in contracts],
        dtype=np.float64,
    ).reshape(-1, 4)
    return tuple(np.ascontiguousarray(cols[:, i]) for i in range(4))


# Contracts evaluated in the published case study (first- and second-event covers).
CASE_STUDY_CONTRACTS = (
    Contract("contract_1", 34, 34, 0, 34),
    Contract("contract_2", 95, 95, 0, 95),
    Contract("contract_3", 190, 190, 0, 190),
    Contract("contract_4", 9, 9, 9, 9),
    Contract("contract_5", 20, 20, 20, 20),
    Contract("contract_6", 34, 34, 34, 34),
)
