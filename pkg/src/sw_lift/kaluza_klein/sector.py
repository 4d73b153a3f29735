"""Circle-bundle geometry and the charge-``q`` sector of spinors on ``Y``.

A section of the charge-``q`` sector is determined by its restriction to the
base, so :class:`SectorSpinor` stores the base Dirac values together with the
charge. The fibre has unit length, which makes :func:`lift` an isometry for
the torus ``L²`` product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..clifford import build_clifford_model, charge_conjugate_fibre
from ..torus_fields import (
    Charge,
    GaugeField,
    Grid4,
    SpinorChirality,
    SpinorField,
    apply_matrix_field,
    l2_inner,
)

LOGGER = logging.getLogger(__name__)

RadiusLike = Union[float, NDArray[np.float64]]


@dataclass(frozen=True, slots=True)
class KKGeometry:
    """Metric ``g_X + r²(dθ + a)²`` on the circle bundle over the torus."""

    gauge: GaugeField
    charge: Charge
    radius: RadiusLike = 1.0

    def __post_init__(self) -> None:
        if np.ndim(self.radius) == 0:
            radius: RadiusLike = float(self.radius)
        else:
            radius = np.array(self.radius, dtype=np.float64, copy=True)
            if radius.shape != self.gauge.grid.shape:
                raise ValueError(
                    f"radius field must have shape {self.gauge.grid.shape}, got {radius.shape}"
                )
            radius.setflags(write=False)
        if not np.all(np.isfinite(radius)) or np.any(np.asarray(radius) <= 0.0):
            raise ValueError("fibre radius must be positive and finite everywhere")
        object.__setattr__(self, "radius", radius)

    @property
    def grid(self) -> Grid4:
        return self.gauge.grid

    @property
    def is_constant_radius(self) -> bool:
        return np.ndim(self.radius) == 0

    @property
    def mass(self) -> RadiusLike:
        """``m = -q/r``; a field when the radius varies."""
        if self.charge.is_zero:
            raise ValueError("the q = 0 sector has no mass term")
        return -self.charge.value / self.radius

    def require_constant_radius(self, operation: str) -> float:
        if not self.is_constant_radius:
            raise ValueError(f"{operation} needs a constant fibre radius")
        return float(self.radius)  # type: ignore[arg-type]

    def mass_factor(self) -> NDArray[np.float64]:
        """Mass broadcast against Dirac values."""
        mass = np.asarray(self.mass, dtype=np.float64)
        return mass if self.is_constant_radius else mass[..., None]


@dataclass(frozen=True, slots=True)
class SectorSpinor:
    """Spinor on ``Y`` in the charge-``q`` sector, stored by its base values."""

    base: SpinorField
    charge: Charge
    origin: SpinorChirality = "full"

    def __post_init__(self) -> None:
        if self.base.chirality != "full":
            raise ValueError("sector spinors carry full Dirac values on the base")

    @property
    def grid(self) -> Grid4:
        return self.base.grid

    @property
    def values(self) -> NDArray[np.complex128]:
        return self.base.values

    def with_values(self, values: ArrayLike, origin: SpinorChirality | None = None) -> SectorSpinor:
        return SectorSpinor(self.base.with_values(values), self.charge, origin or self.origin)

    def scaled(self, factor: complex | ArrayLike) -> SectorSpinor:
        return SectorSpinor(self.base.scaled(factor), self.charge, self.origin)

    def __add__(self, other: SectorSpinor) -> SectorSpinor:
        self._require_same_sector(other)
        origin = self.origin if self.origin == other.origin else "full"
        return SectorSpinor(self.base + other.base, self.charge, origin)

    def __sub__(self, other: SectorSpinor) -> SectorSpinor:
        self._require_same_sector(other)
        origin = self.origin if self.origin == other.origin else "full"
        return SectorSpinor(self.base - other.base, self.charge, origin)

    def _require_same_sector(self, other: SectorSpinor) -> None:
        if self.charge != other.charge:
            raise ValueError(f"sector mismatch: q={self.charge} vs q={other.charge}")

    def pointwise_norm_sq(self) -> NDArray[np.float64]:
        return self.base.pointwise_norm_sq()


def lift(phi: SpinorField, q: Charge) -> SectorSpinor:
    """Pull back a base spinor into the charge-``q`` sector; Weyl halves go to their slots."""
    return SectorSpinor(phi.to_full(), q, phi.chirality)


def unlift(psi: SectorSpinor) -> SpinorField:
    """Inverse of :func:`lift`, returning the chirality the spinor was lifted from."""
    if psi.origin == "plus":
        return psi.base.plus_part()
    if psi.origin == "minus":
        return psi.base.minus_part()
    return psi.base


def sector_inner(psi: SectorSpinor, chi: SectorSpinor) -> complex:
    """``L²`` product on ``Y`` with a unit-length fibre."""
    psi._require_same_sector(chi)
    return l2_inner(psi.base, chi.base)


def chirality_split(psi: SectorSpinor) -> tuple[SectorSpinor, SectorSpinor]:
    """Split into the ``S+`` and ``S-`` parts, both kept as full Dirac values."""
    model = build_clifford_model()
    plus = apply_matrix_field(model.weyl_plus, psi.values)
    minus = apply_matrix_field(model.weyl_minus, psi.values)
    return psi.with_values(plus, "plus"), psi.with_values(minus, "minus")


def charge_conjugate_sector(psi: SectorSpinor, inverse: bool = False) -> SectorSpinor:
    """Map the charge-``q`` sector onto charge ``-q`` by ``ψ ↦ γ(K)Jψ``.

    On a positive spinor this is the map used for Seiberg-Witten configurations.
    The map squares to ``-Id``; ``inverse=True`` undoes it.
    """
    model = build_clifford_model()
    values = apply_matrix_field(model.gammaK, charge_conjugate_fibre(psi.values))
    if inverse:
        values = -values
    LOGGER.debug("Charge-conjugated sector q=%s", psi.charge)
    return SectorSpinor(psi.base.with_values(values), -psi.charge, psi.origin)


__all__ = [
    "KKGeometry",
    "RadiusLike",
    "SectorSpinor",
    "charge_conjugate_sector",
    "chirality_split",
    "lift",
    "sector_inner",
    "unlift",
]
