"""Seiberg-Witten configurations on the torus, their residuals and symmetries."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .clifford import (
    PLUS,
    build_clifford_model,
    charge_conjugate_fibre,
    selfdual_split_values,
    selfdual_values,
    sigma_coefficients,
)
from .torus_fields import (
    Charge,
    GaugeField,
    Grid4,
    SeedLike,
    SpinorField,
    TwoFormField,
    apply_matrix_field,
    curvature,
    dirac_X,
    l2_norm,
    max_wavenumber,
    partial_values,
    random_gauge,
    random_spinor,
    random_two_form,
    selfdual_split_field,
)

LOGGER = logging.getLogger(__name__)

MU_TOLERANCE = 1e-12


@dataclass(frozen=True, slots=True)
class SWConfiguration:
    """Gauge field, positive Weyl spinor, charge and perturbation ``μ``."""

    A: GaugeField
    phi: SpinorField
    q: Charge
    mu: TwoFormField

    def __post_init__(self) -> None:
        if self.A.grid != self.phi.grid or self.A.grid != self.mu.grid:
            raise ValueError("configuration fields live on different grids")
        if self.phi.chirality != "plus":
            raise ValueError(f"SW spinor must have positive chirality, got {self.phi.chirality}")
        if self.q.is_zero:
            raise ValueError("charge q = 0 is excluded for Seiberg-Witten configurations")
        scale = max(1.0, float(np.max(np.abs(self.mu.values), initial=0.0)))
        _, minus = selfdual_split_values(self.mu.values)
        real_part = float(np.max(np.abs(self.mu.values.real), initial=0.0))
        minus_part = float(np.max(np.abs(minus), initial=0.0))
        if max(real_part, minus_part) > MU_TOLERANCE * scale:
            raise ValueError(
                f"perturbation must be imaginary self-dual (real part {real_part:.2e}, "
                f"anti-self-dual part {minus_part:.2e})"
            )

    @property
    def grid(self) -> Grid4:
        return self.phi.grid

    def with_fields(
        self,
        *,
        A: GaugeField | None = None,
        phi: SpinorField | None = None,
        mu: TwoFormField | None = None,
    ) -> SWConfiguration:
        return SWConfiguration(
            A=self.A if A is None else A,
            phi=self.phi if phi is None else phi,
            q=self.q,
            mu=self.mu if mu is None else mu,
        )


@dataclass(frozen=True, slots=True)
class SWResidual:
    dirac_part: SpinorField
    curvature_part: TwoFormField

    def norms(self) -> tuple[float, float]:
        return l2_norm(self.dirac_part), l2_norm(self.curvature_part)

    def objective(self) -> float:
        dirac, curv = self.norms()
        return dirac**2 + curv**2


def sigma_field(phi: SpinorField) -> TwoFormField:
    """Pointwise ``σ(φ, φ)`` as an imaginary self-dual field."""
    if phi.chirality != "plus":
        raise ValueError("sigma is defined on positive Weyl spinors")
    return TwoFormField(phi.grid, selfdual_values(sigma_coefficients(phi.values)), "imaginary")


def determinant_curvature_plus(A: GaugeField, q: Charge) -> TwoFormField:
    """``F_{A_n}^+ = 2q F_A^+``."""
    plus, _ = selfdual_split_field(curvature(A))
    return plus.scaled(q.doubled)


def sw_residual(cfg: SWConfiguration) -> SWResidual:
    dirac_part = dirac_X(cfg.A, cfg.q, cfg.phi)
    curvature_part = determinant_curvature_plus(cfg.A, cfg.q) - sigma_field(cfg.phi) - cfg.mu
    return SWResidual(dirac_part, curvature_part.with_values(curvature_part.values, "imaginary"))


def manufactured_mu(A: GaugeField, phi: SpinorField, q: Charge) -> TwoFormField:
    """Perturbation making the curvature equation hold exactly."""
    mu = determinant_curvature_plus(A, q) - sigma_field(phi)
    return mu.with_values(mu.values, "imaginary")


def manufactured_solution(
    grid: Grid4,
    q: Charge,
    phi0: ArrayLike,
    winding: tuple[int, int, int, int] = (0, 0, 0, 0),
) -> SWConfiguration:
    """Exact solution: flat ``A = 2i·w·dx``, ``φ = e^{-2iq w·x} φ0``, ``μ = -σ(φ0)``."""
    fibre = np.asarray(phi0, dtype=np.complex128)
    phase = np.exp(-1j * q.doubled * _winding_phase(grid, winding))
    phi = SpinorField(grid, "plus", phase[..., None] * fibre)
    A = GaugeField.flat(grid, 2.0 * np.asarray(winding, dtype=np.float64))
    mu = TwoFormField(
        grid,
        np.broadcast_to(-selfdual_values(sigma_coefficients(fibre)), grid.shape + (6,)),
        "imaginary",
    )
    return SWConfiguration(A=A, phi=phi, q=q, mu=mu)


def random_configuration(
    grid: Grid4, seed: SeedLike, kmax: int, q: Charge, with_mu: bool = True
) -> SWConfiguration:
    base = [seed] if isinstance(seed, int) else list(seed)
    A = random_gauge(grid, base + [0], kmax)
    phi = random_spinor(grid, base + [1], kmax, "plus")
    if with_mu:
        mu = random_two_form(grid, base + [2], kmax, selfdual=True)
    else:
        mu = TwoFormField(grid, np.zeros(grid.shape + (6,)), "imaginary")
    return SWConfiguration(A=A, phi=phi, q=q, mu=mu)


def _winding_phase(grid: Grid4, winding: tuple[int, ...]) -> NDArray[np.float64]:
    if len(winding) != 4:
        raise ValueError(f"winding needs four integers, got {winding}")
    total = np.zeros(grid.shape)
    for axis, w in enumerate(winding, start=1):
        if w:
            total = total + int(w) * grid.coordinate(axis)
    return total


@dataclass(frozen=True, slots=True)
class GaugeTransform:
    """``h = e^{iλ}`` with ``λ = w·x + χ``; ``w`` integral, ``χ`` a real periodic field."""

    winding: tuple[int, int, int, int] = (0, 0, 0, 0)
    chi: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        winding = tuple(int(w) for w in self.winding)
        if len(winding) != 4:
            raise ValueError(f"winding needs four integers, got {self.winding}")
        object.__setattr__(self, "winding", winding)
        if self.chi is not None:
            chi = np.array(self.chi, dtype=np.float64, copy=True)
            chi.setflags(write=False)
            object.__setattr__(self, "chi", chi)

    def compose(self, other: GaugeTransform) -> GaugeTransform:
        winding = tuple(a + b for a, b in zip(self.winding, other.winding))
        if self.chi is None:
            chi = other.chi
        elif other.chi is None:
            chi = self.chi
        else:
            chi = self.chi + other.chi
        return GaugeTransform(winding, chi)  # type: ignore[arg-type]

    def phase(self, grid: Grid4) -> NDArray[np.float64]:
        """``λ`` sampled on the grid."""
        total = _winding_phase(grid, self.winding)
        if self.chi is not None:
            if self.chi.shape != grid.shape:
                raise ValueError(f"chi must have shape {grid.shape}, got {self.chi.shape}")
            total = total + self.chi
        return total


def winding_fits_grid(phi: SpinorField, q: Charge, winding: tuple[int, ...]) -> bool:
    """True when ``e^{-2iq w·x}φ`` stays inside the exactly representable spectrum."""
    n = phi.grid.n
    kmax = max_wavenumber(phi.values)
    for w in winding:
        shift = -q.doubled * int(w)
        if -kmax + shift < -n // 2 or kmax + shift > n // 2 - 1:
            return False
    return True


def winding_grid_size(n: int, kmax: int, q: Charge, winding: tuple[int, ...]) -> int:
    """Smallest even ``N >= n`` holding a band-``kmax`` spinor after the winding phase."""
    if kmax < 0:
        raise ValueError(f"kmax must be non-negative, got {kmax}")
    shift = max((abs(q.doubled * int(w)) for w in winding), default=0)
    needed = 2 * (kmax + shift) + 2
    size = max(n, needed)
    return size + size % 2


def gauge_transform(cfg: SWConfiguration, h: GaugeTransform) -> SWConfiguration:
    """``A' = A + i d(2λ)``, ``φ' = e^{-2iqλ} φ``; ``μ`` is unchanged."""
    grid = cfg.grid
    holonomy = cfg.A.holonomy + 2.0 * np.asarray(h.winding, dtype=np.float64)
    components = np.array(cfg.A.components, copy=True)
    if h.chi is not None:
        if h.chi.shape != grid.shape:
            raise ValueError(f"chi must have shape {grid.shape}, got {h.chi.shape}")
        for axis in range(4):
            components[axis] += 2.0 * partial_values(h.chi, axis + 1)
    if any(h.winding) and not winding_fits_grid(cfg.phi, cfg.q, h.winding):
        LOGGER.warning(
            "Winding %s with 2q=%d shifts the spinor spectrum past the grid; "
            "derivatives of the transformed spinor are aliased",
            h.winding,
            cfg.q.doubled,
        )
    phase = np.exp(-1j * cfg.q.doubled * h.phase(grid))
    return cfg.with_fields(
        A=GaugeField(grid, components, holonomy),
        phi=cfg.phi.with_values(phase[..., None] * cfg.phi.values),
    )


def conjugate_plus_values(values: ArrayLike, inverse: bool = False) -> NDArray[np.complex128]:
    """``φ ↦ γ(K)·Jφ`` on ``S+``; squares to ``-Id``."""
    model = build_clifford_model()
    conjugated = apply_matrix_field(model.gammaK[PLUS, PLUS], charge_conjugate_fibre(values))
    return -conjugated if inverse else conjugated


def charge_conjugate_config(cfg: SWConfiguration, inverse: bool = False) -> SWConfiguration:
    """Conjugate structure: ``q ↦ -q``, ``μ ↦ -μ``, ``φ ↦ γ(K)Jφ``.

    The stored samples ``a_μ`` describe the Kaluza-Klein connection form and are
    kept, so the spinor coupling ``q·a`` and ``F_{A_n} = 2q F_A`` change sign.
    """
    return SWConfiguration(
        A=cfg.A,
        phi=cfg.phi.with_values(conjugate_plus_values(cfg.phi.values, inverse=inverse)),
        q=-cfg.q,
        mu=-cfg.mu,
    )


def residual_norms(cfg: SWConfiguration) -> dict[str, Any]:
    dirac, curv = sw_residual(cfg).norms()
    return {"dirac": dirac, "curvature": curv, "objective": dirac**2 + curv**2}


__all__ = [
    "GaugeTransform",
    "SWConfiguration",
    "SWResidual",
    "charge_conjugate_config",
    "conjugate_plus_values",
    "determinant_curvature_plus",
    "gauge_transform",
    "manufactured_mu",
    "manufactured_solution",
    "random_configuration",
    "residual_norms",
    "sigma_field",
    "sw_residual",
    "winding_fits_grid",
    "winding_grid_size",
]
