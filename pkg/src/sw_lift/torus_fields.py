"""Spectral field calculus on the flat torus ``(R/2πZ)^4``.

Fields store their samples with the four site axes first and any component
axis last. Derivatives are taken in Fourier space, so they are exact for
band-limited data.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .clifford import PAIRS, SELFDUAL_BASIS, build_clifford_model, selfdual_split_values

LOGGER = logging.getLogger(__name__)

SpinorChirality = Literal["plus", "minus", "full"]
FieldKind = Literal["spinor+", "spinor-", "spinor", "gauge", "twoform", "selfdual", "scalar"]
SeedLike = Union[int, Sequence[int]]

SITE_AXES = (0, 1, 2, 3)
SPINOR_ARITY: dict[str, int] = {"plus": 2, "minus": 2, "full": 4}
TRIPLES: tuple[tuple[int, int, int], ...] = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
_PAIR_INDEX = {pair: index for index, pair in enumerate(PAIRS)}


class GridMismatchError(ValueError):
    """Raised when fields on different grids are combined."""


@dataclass(frozen=True, slots=True)
class Grid4:
    n: int

    def __post_init__(self) -> None:
        if self.n < 4 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 4, got {self.n}")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.n, self.n, self.n, self.n)

    @property
    def site_count(self) -> int:
        return self.n**4

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.n

    @property
    def volume_weight(self) -> float:
        return self.spacing**4

    def wavenumbers(self) -> NDArray[np.float64]:
        return np.fft.fftfreq(self.n, d=1.0 / self.n)

    def coordinate(self, axis: int) -> NDArray[np.float64]:
        """Coordinate ``x^axis`` (axis 1..4) broadcast over the grid."""
        _check_axis(axis)
        points = np.arange(self.n) * self.spacing
        shape = [1, 1, 1, 1]
        shape[axis - 1] = self.n
        return np.broadcast_to(points.reshape(shape), self.shape)


@dataclass(frozen=True, slots=True)
class Charge:
    """Charge ``q`` stored as the integer ``2q``."""

    doubled: int

    @classmethod
    def of(cls, value: float | Fraction) -> Charge:
        doubled = Fraction(value) * 2
        if doubled.denominator != 1:
            raise ValueError(f"charge must be an integer or half-integer, got {value}")
        return cls(int(doubled))

    @property
    def value(self) -> float:
        return self.doubled / 2.0

    @property
    def is_zero(self) -> bool:
        return self.doubled == 0

    def __neg__(self) -> Charge:
        return Charge(-self.doubled)

    def __str__(self) -> str:
        return str(Fraction(self.doubled, 2))


def _check_axis(axis: int) -> None:
    if axis not in (1, 2, 3, 4):
        raise ValueError(f"axis must be in 1..4, got {axis}")


def _require_same_grid(*grids: Grid4) -> Grid4:
    first = grids[0]
    for other in grids[1:]:
        if other != first:
            raise GridMismatchError(f"grid mismatch: N={first.n} vs N={other.n}")
    return first


def _site_values(grid: Grid4, values: ArrayLike, trailing: tuple[int, ...], dtype: Any) -> NDArray[Any]:
    array = np.array(values, dtype=dtype, copy=True)
    expected = grid.shape + trailing
    if array.shape != expected:
        raise ValueError(f"expected field samples of shape {expected}, got {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, slots=True)
class SpinorField:
    grid: Grid4
    chirality: SpinorChirality
    values: NDArray[np.complex128]

    def __post_init__(self) -> None:
        if self.chirality not in SPINOR_ARITY:
            raise ValueError(f"Unsupported chirality: {self.chirality}")
        arity = SPINOR_ARITY[self.chirality]
        object.__setattr__(
            self, "values", _site_values(self.grid, self.values, (arity,), np.complex128)
        )

    @classmethod
    def zeros(cls, grid: Grid4, chirality: SpinorChirality) -> SpinorField:
        return cls(grid, chirality, np.zeros(grid.shape + (SPINOR_ARITY[chirality],)))

    @classmethod
    def constant(cls, grid: Grid4, chirality: SpinorChirality, value: ArrayLike) -> SpinorField:
        fibre = np.asarray(value, dtype=np.complex128)
        return cls(grid, chirality, np.broadcast_to(fibre, grid.shape + fibre.shape))

    def with_values(self, values: ArrayLike) -> SpinorField:
        return SpinorField(self.grid, self.chirality, values)

    def scaled(self, factor: complex | ArrayLike) -> SpinorField:
        factor_array = np.asarray(factor)
        if factor_array.ndim:
            factor_array = factor_array[..., None]
        return self.with_values(factor_array * self.values)

    def __add__(self, other: SpinorField) -> SpinorField:
        self._require_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: SpinorField) -> SpinorField:
        self._require_compatible(other)
        return self.with_values(self.values - other.values)

    def _require_compatible(self, other: SpinorField) -> None:
        _require_same_grid(self.grid, other.grid)
        if self.chirality != other.chirality:
            raise ValueError(f"chirality mismatch: {self.chirality} vs {other.chirality}")

    def to_full(self) -> SpinorField:
        if self.chirality == "full":
            return self
        values = np.zeros(self.grid.shape + (4,), dtype=np.complex128)
        if self.chirality == "plus":
            values[..., :2] = self.values
        else:
            values[..., 2:] = self.values
        return SpinorField(self.grid, "full", values)

    def plus_part(self) -> SpinorField:
        return SpinorField(self.grid, "plus", self.to_full().values[..., :2])

    def minus_part(self) -> SpinorField:
        return SpinorField(self.grid, "minus", self.to_full().values[..., 2:])

    def pointwise_norm_sq(self) -> NDArray[np.float64]:
        return pointwise_norm_sq(self.values)


@dataclass(frozen=True, slots=True)
class GaugeField:
    """Real samples ``a_μ`` of the connection ``A = i·a``.

    ``components`` holds the oscillatory part with shape ``(4, N, N, N, N)``;
    ``holonomy`` the constant flat part.
    """

    grid: Grid4
    components: NDArray[np.float64]
    holonomy: NDArray[np.float64]

    def __post_init__(self) -> None:
        components = np.array(self.components, dtype=np.float64, copy=True)
        if components.shape != (4,) + self.grid.shape:
            raise ValueError(
                f"gauge components must have shape {(4,) + self.grid.shape}, got {components.shape}"
            )
        holonomy = np.array(self.holonomy, dtype=np.float64, copy=True).reshape(4)
        components.setflags(write=False)
        holonomy.setflags(write=False)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "holonomy", holonomy)

    @classmethod
    def zero(cls, grid: Grid4) -> GaugeField:
        return cls(grid, np.zeros((4,) + grid.shape), np.zeros(4))

    @classmethod
    def flat(cls, grid: Grid4, holonomy: ArrayLike) -> GaugeField:
        return cls(grid, np.zeros((4,) + grid.shape), np.asarray(holonomy, dtype=np.float64))

    def totals(self) -> NDArray[np.float64]:
        return self.components + self.holonomy.reshape(4, 1, 1, 1, 1)

    def __add__(self, other: GaugeField) -> GaugeField:
        _require_same_grid(self.grid, other.grid)
        return GaugeField(
            self.grid, self.components + other.components, self.holonomy + other.holonomy
        )

    def __neg__(self) -> GaugeField:
        return GaugeField(self.grid, -self.components, -self.holonomy)

    def scaled(self, factor: float) -> GaugeField:
        return GaugeField(self.grid, factor * self.components, factor * self.holonomy)


@dataclass(frozen=True, slots=True)
class TwoFormField:
    grid: Grid4
    values: NDArray[np.complex128]
    value_class: str = "complex"

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _site_values(self.grid, self.values, (6,), np.complex128)
        )

    @classmethod
    def zeros(cls, grid: Grid4) -> TwoFormField:
        return cls(grid, np.zeros(grid.shape + (6,)), "real")

    def with_values(self, values: ArrayLike, value_class: str | None = None) -> TwoFormField:
        return TwoFormField(self.grid, values, value_class or self.value_class)

    def scaled(self, factor: float) -> TwoFormField:
        return self.with_values(factor * self.values)

    def __add__(self, other: TwoFormField) -> TwoFormField:
        _require_same_grid(self.grid, other.grid)
        same = self.value_class == other.value_class
        return self.with_values(self.values + other.values, self.value_class if same else "complex")

    def __sub__(self, other: TwoFormField) -> TwoFormField:
        _require_same_grid(self.grid, other.grid)
        same = self.value_class == other.value_class
        return self.with_values(self.values - other.values, self.value_class if same else "complex")

    def __neg__(self) -> TwoFormField:
        return self.with_values(-self.values)

    def pointwise_norm_sq(self) -> NDArray[np.float64]:
        return pointwise_norm_sq(self.values)


Field = Union[SpinorField, GaugeField, TwoFormField]


def pointwise_norm_sq(values: ArrayLike) -> NDArray[np.float64]:
    return np.sum(np.abs(np.asarray(values)) ** 2, axis=-1)


def apply_matrix_field(matrices: ArrayLike, values: ArrayLike) -> NDArray[np.complex128]:
    """Per-site matrix-vector product ``M(x)·v(x)``; ``M`` may be a single matrix."""
    return np.einsum("...ab,...b->...a", np.asarray(matrices), np.asarray(values))


def partial_values(values: ArrayLike, axis: int) -> NDArray[Any]:
    """Spectral derivative along ``x^axis`` of samples whose first four axes are sites.

    Complex samples keep the Nyquist mode at ``-N/2``; real samples drop it so the
    derivative stays real.
    """
    _check_axis(axis)
    array = np.asarray(values)
    position = axis - 1
    n = array.shape[position]
    wavenumbers = np.fft.fftfreq(n, d=1.0 / n)
    factor = 1j * wavenumbers
    real = not np.iscomplexobj(array)
    if real:
        factor[n // 2] = 0.0
    shape = [1] * array.ndim
    shape[position] = n
    spectrum = np.fft.fft(array, axis=position) * factor.reshape(shape)
    derivative = np.fft.ifft(spectrum, axis=position)
    return derivative.real if real else derivative


def spectral_partial(f: Field | NDArray[Any], axis: int) -> Any:
    if isinstance(f, SpinorField):
        return f.with_values(partial_values(f.values, axis))
    if isinstance(f, TwoFormField):
        return f.with_values(partial_values(f.values, axis))
    if isinstance(f, GaugeField):
        moved = np.moveaxis(f.components, 0, -1)
        derivative = np.moveaxis(partial_values(moved, axis), -1, 0)
        return GaugeField(f.grid, derivative, np.zeros(4))
    if isinstance(f, np.ndarray):
        return partial_values(f, axis)
    raise TypeError(f"cannot differentiate object of type {type(f).__name__}")


def curvature(A: GaugeField) -> TwoFormField:
    """``F_A = dA`` for ``A = i·a``; returns ``i·(∂_μ a_ν - ∂_ν a_μ)``."""
    derivatives = [[partial_values(A.components[nu], mu + 1) for nu in range(4)] for mu in range(4)]
    values = np.stack(
        [derivatives[i][j] - derivatives[j][i] for i, j in PAIRS], axis=-1
    )
    return TwoFormField(A.grid, 1j * values, "imaginary")


def exterior_derivative(F: TwoFormField) -> NDArray[np.complex128]:
    """Components ``(dF)_{ijk}`` for ``i<j<k`` in ``TRIPLES`` order, shape ``(..., 4)``."""
    def component(i: int, j: int) -> NDArray[np.complex128]:
        return F.values[..., _PAIR_INDEX[(i, j)]]

    result = [
        partial_values(component(j, k), i + 1)
        - partial_values(component(i, k), j + 1)
        + partial_values(component(i, j), k + 1)
        for i, j, k in TRIPLES
    ]
    return np.stack(result, axis=-1)


def selfdual_split_field(F: TwoFormField) -> tuple[TwoFormField, TwoFormField]:
    plus, minus = selfdual_split_values(F.values)
    return F.with_values(plus), F.with_values(minus)


def dirac_X(A: GaugeField, q: Charge, phi: SpinorField) -> SpinorField:
    """Twisted Dirac operator ``Σ_μ γ_μ (∂_μ + i q a_μ)``; flips Weyl chirality."""
    _require_same_grid(A.grid, phi.grid)
    model = build_clifford_model()
    if phi.chirality == "full":
        blocks = [model.gamma[mu] for mu in range(4)]
        target: SpinorChirality = "full"
    elif phi.chirality == "plus":
        blocks = [model.to_minus_block(mu) for mu in range(4)]
        target = "minus"
    else:
        blocks = [model.to_plus_block(mu) for mu in range(4)]
        target = "plus"
    totals = A.totals()
    result = np.zeros(phi.grid.shape + (blocks[0].shape[0],), dtype=np.complex128)
    for mu, block in enumerate(blocks):
        covariant = partial_values(phi.values, mu + 1)
        if not q.is_zero:
            covariant = covariant + 1j * q.value * totals[mu][..., None] * phi.values
        result += apply_matrix_field(block, covariant)
    return SpinorField(phi.grid, target, result)


def _samples(f: Field | NDArray[Any]) -> NDArray[Any]:
    if isinstance(f, GaugeField):
        return np.moveaxis(f.totals(), 0, -1)
    if isinstance(f, (SpinorField, TwoFormField)):
        return f.values
    return np.asarray(f)


def _grid_of(f: Field | NDArray[Any]) -> Grid4 | None:
    return getattr(f, "grid", None)


def l2_inner(f: Field | NDArray[Any], g: Field | NDArray[Any]) -> complex:
    """``⟨f, g⟩ = Σ_x conj(f)·g · (2π/N)^4``, antilinear in ``f``."""
    grid_f, grid_g = _grid_of(f), _grid_of(g)
    if grid_f is not None and grid_g is not None:
        _require_same_grid(grid_f, grid_g)
    left, right = _samples(f), _samples(g)
    if left.shape != right.shape:
        raise GridMismatchError(f"sample shapes differ: {left.shape} vs {right.shape}")
    n = left.shape[0]
    weight = (2.0 * np.pi / n) ** 4
    return complex(np.vdot(left, right) * weight)


def l2_norm(f: Field | NDArray[Any]) -> float:
    return float(np.sqrt(max(l2_inner(f, f).real, 0.0)))


def l2_inner_fourier(f: Field | NDArray[Any], g: Field | NDArray[Any]) -> complex:
    """Same inner product evaluated from Fourier coefficients."""
    left = np.fft.fftn(_samples(f), axes=SITE_AXES)
    right = np.fft.fftn(_samples(g), axes=SITE_AXES)
    n = left.shape[0]
    weight = (2.0 * np.pi / n) ** 4 / n**4
    return complex(np.vdot(left, right) * weight)


def _band_mask(grid: Grid4, kmax: int) -> NDArray[np.bool_]:
    k = np.abs(grid.wavenumbers()) <= kmax
    return k[:, None, None, None] & k[None, :, None, None] & k[None, None, :, None] & k[None, None, None, :]


def _band_limited_samples(
    rng: np.random.Generator, grid: Grid4, kmax: int, components: int, real: bool
) -> NDArray[Any]:
    mask = _band_mask(grid, kmax)
    shape = grid.shape + (components,)
    spectrum = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    spectrum *= mask[..., None]
    count = int(np.count_nonzero(mask))
    samples = np.fft.ifftn(spectrum, axes=SITE_AXES) * (grid.site_count / np.sqrt(count))
    return samples.real if real else samples


def _check_kmax(grid: Grid4, kmax: int) -> None:
    if kmax < 0 or 2 * kmax >= grid.n:
        raise ValueError(f"kmax={kmax} too large for grid N={grid.n} (need 0 <= kmax < N/2)")


def random_spinor(grid: Grid4, seed: SeedLike, kmax: int, chirality: SpinorChirality) -> SpinorField:
    _check_kmax(grid, kmax)
    rng = np.random.default_rng(seed)
    values = _band_limited_samples(rng, grid, kmax, SPINOR_ARITY[chirality], real=False)
    return SpinorField(grid, chirality, values)


def random_gauge(grid: Grid4, seed: SeedLike, kmax: int) -> GaugeField:
    _check_kmax(grid, kmax)
    rng = np.random.default_rng(seed)
    samples = _band_limited_samples(rng, grid, kmax, 4, real=True)
    mean = samples.mean(axis=SITE_AXES)
    components = np.moveaxis(samples - mean, -1, 0)
    return GaugeField(grid, components, mean + rng.uniform(-0.5, 0.5, size=4))


def random_two_form(grid: Grid4, seed: SeedLike, kmax: int, selfdual: bool = False) -> TwoFormField:
    _check_kmax(grid, kmax)
    rng = np.random.default_rng(seed)
    if selfdual:
        coefficients = _band_limited_samples(rng, grid, kmax, 3, real=True)
        values = 1j * np.einsum("...k,kp->...p", coefficients, SELFDUAL_BASIS)
    else:
        values = 1j * _band_limited_samples(rng, grid, kmax, 6, real=True)
    return TwoFormField(grid, values, "imaginary")


def random_scalar(grid: Grid4, seed: SeedLike, kmax: int) -> NDArray[np.float64]:
    _check_kmax(grid, kmax)
    rng = np.random.default_rng(seed)
    return np.asarray(_band_limited_samples(rng, grid, kmax, 1, real=True)[..., 0])


def random_band_limited(grid: Grid4, seed: SeedLike, kmax: int, kind: FieldKind) -> Any:
    """Deterministic random field with Fourier support in ``|k_μ| <= kmax``."""
    if kind == "spinor+":
        return random_spinor(grid, seed, kmax, "plus")
    if kind == "spinor-":
        return random_spinor(grid, seed, kmax, "minus")
    if kind == "spinor":
        return random_spinor(grid, seed, kmax, "full")
    if kind == "gauge":
        return random_gauge(grid, seed, kmax)
    if kind == "twoform":
        return random_two_form(grid, seed, kmax)
    if kind == "selfdual":
        return random_two_form(grid, seed, kmax, selfdual=True)
    if kind == "scalar":
        return random_scalar(grid, seed, kmax)
    raise ValueError(f"Unsupported field kind: {kind}")


def max_wavenumber(values: ArrayLike, atol: float = 1e-10) -> int:
    """Largest ``|k_μ|`` carrying spectral weight above ``atol`` (relative)."""
    spectrum = np.abs(np.fft.fftn(np.asarray(values), axes=SITE_AXES))
    if spectrum.ndim > 4:
        spectrum = spectrum.reshape(spectrum.shape[:4] + (-1,)).max(axis=-1)
    peak = float(spectrum.max(initial=0.0))
    if peak == 0.0:
        return 0
    n = spectrum.shape[0]
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n)).astype(int)
    support = np.argwhere(spectrum > atol * peak)
    return int(max(k[index] for row in support for index in row))


__all__ = [
    "Charge",
    "Field",
    "GaugeField",
    "Grid4",
    "GridMismatchError",
    "SpinorChirality",
    "SpinorField",
    "TRIPLES",
    "TwoFormField",
    "apply_matrix_field",
    "curvature",
    "dirac_X",
    "exterior_derivative",
    "l2_inner",
    "l2_inner_fourier",
    "l2_norm",
    "max_wavenumber",
    "partial_values",
    "pointwise_norm_sq",
    "random_band_limited",
    "random_gauge",
    "random_scalar",
    "random_spinor",
    "random_two_form",
    "selfdual_split_field",
    "spectral_partial",
]
