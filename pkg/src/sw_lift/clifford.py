"""Fibrewise Clifford algebra for dimensions four and five.

Conventions used throughout the package:

* ``v·w + w·v = -2 g(v, w)`` for real vectors ``v`` and ``w``.
* Dirac values have four components; ``S+`` is spanned by components 0 and 1,
  ``S-`` by components 2 and 3.
* Two-form coefficients are ordered ``(12, 13, 14, 23, 24, 34)`` and a two-form
  acts by ``γ(ω) = Σ_{i<j} ω_ij γ_i γ_j``.
* The vertical unit vector acts by ``γ(K) = i·dvol``.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import null_space

LOGGER = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]
WeylValue = ComplexArray
DiracValue = ComplexArray
ValueClass = Literal["real", "imaginary", "complex"]
GammaRestriction = Literal["full", "restricted"]

PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PLUS = slice(0, 2)
MINUS = slice(2, 4)

PAULI: ComplexArray = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128
)

# (*ω)_p = Σ_q HODGE[p, q] ω_q on flat R^4 with orientation e1∧e2∧e3∧e4.
HODGE: RealArray = np.array(
    [
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, -1, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, -1, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
    ],
    dtype=np.float64,
)

SELFDUAL_BASIS: RealArray = np.array(
    [[1, 0, 0, 0, 0, 1], [0, 1, 0, 0, -1, 0], [0, 0, 1, 1, 0, 0]], dtype=np.float64
)
ANTISELFDUAL_BASIS: RealArray = np.array(
    [[1, 0, 0, 0, 0, -1], [0, 1, 0, 0, 1, 0], [0, 0, 1, -1, 0, 0]], dtype=np.float64
)

_CLASS_TOLERANCE = 1e-14


def _frozen(array: ArrayLike, dtype: Any = np.complex128) -> NDArray[Any]:
    result = np.array(array, dtype=dtype, copy=True)
    result.setflags(write=False)
    return result


def classify_values(coeffs: ArrayLike, atol: float = _CLASS_TOLERANCE) -> ValueClass:
    values = np.asarray(coeffs)
    if np.all(np.abs(np.imag(values)) <= atol):
        return "real"
    if np.all(np.abs(np.real(values)) <= atol):
        return "imaginary"
    return "complex"


@dataclass(frozen=True, slots=True)
class TwoFormFibre:
    """A two-form at one point, six coefficients in ``PAIRS`` order."""

    coeffs: ComplexArray
    value_class: ValueClass = "complex"

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (6,):
            raise ValueError(f"two-form fibre needs 6 coefficients, got shape {coeffs.shape}")
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    @classmethod
    def from_coefficients(cls, coeffs: ArrayLike) -> TwoFormFibre:
        return cls(np.asarray(coeffs, dtype=np.complex128), classify_values(coeffs))

    @classmethod
    def imaginary(cls, real_coeffs: ArrayLike) -> TwoFormFibre:
        return cls(1j * np.asarray(real_coeffs, dtype=np.float64), "imaginary")

    @classmethod
    def zero(cls) -> TwoFormFibre:
        return cls(np.zeros(6, dtype=np.complex128), "real")

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def scaled(self, factor: complex) -> TwoFormFibre:
        return TwoFormFibre.from_coefficients(factor * self.coeffs)

    def __add__(self, other: TwoFormFibre) -> TwoFormFibre:
        return TwoFormFibre.from_coefficients(self.coeffs + other.coeffs)

    def __sub__(self, other: TwoFormFibre) -> TwoFormFibre:
        return TwoFormFibre.from_coefficients(self.coeffs - other.coeffs)


@dataclass(frozen=True, slots=True)
class CliffordModel:
    """Frozen matrices realising Clifford multiplication on the Dirac fibre."""

    gamma: ComplexArray
    weyl_plus: ComplexArray
    weyl_minus: ComplexArray
    dvol4: ComplexArray
    pair_products: ComplexArray
    selfdual_plus: ComplexArray
    selfdual_dual: ComplexArray
    conjugation: ComplexArray
    sd_basis: RealArray = field(default_factory=lambda: _frozen(SELFDUAL_BASIS, np.float64))
    asd_basis: RealArray = field(
        default_factory=lambda: _frozen(ANTISELFDUAL_BASIS, np.float64)
    )

    @property
    def gamma4(self) -> ComplexArray:
        return self.gamma[:4]

    @property
    def gammaK(self) -> ComplexArray:
        return self.gamma[4]

    def plus_block(self, matrix: ComplexArray) -> ComplexArray:
        return matrix[..., PLUS, PLUS]

    def to_minus_block(self, mu: int) -> ComplexArray:
        """Block of ``γ_mu`` mapping ``S+`` into ``S-``."""
        return self.gamma[mu][MINUS, PLUS]

    def to_plus_block(self, mu: int) -> ComplexArray:
        """Block of ``γ_mu`` mapping ``S-`` into ``S+``."""
        return self.gamma[mu][PLUS, MINUS]


def _conjugation_intertwiner(gamma4: ComplexArray) -> ComplexArray:
    identity = np.eye(4, dtype=np.complex128)
    system = np.concatenate(
        [np.kron(g, identity) - np.kron(identity, np.conj(g).T) for g in gamma4]
    )
    kernel = null_space(system)
    if kernel.shape[1] != 1:
        raise RuntimeError(
            f"conjugation intertwiner is not unique: kernel dimension {kernel.shape[1]}"
        )
    matrix = kernel[:, 0].reshape(4, 4)
    matrix = matrix / np.sqrt(np.real(matrix.conj().T @ matrix)[0, 0])
    lead = matrix.flat[int(np.argmax(np.abs(matrix.ravel()) > 1e-12))]
    return np.asarray(matrix * (np.conj(lead) / abs(lead)), dtype=np.complex128)


@functools.cache
def build_clifford_model() -> CliffordModel:
    """Return the shared Clifford model; every call yields the same matrices."""
    identity2 = np.eye(2, dtype=np.complex128)
    quaternion_units = [identity2, 1j * PAULI[0], 1j * PAULI[1], 1j * PAULI[2]]
    gamma = np.zeros((5, 4, 4), dtype=np.complex128)
    for mu, unit in enumerate(quaternion_units):
        gamma[mu][MINUS, PLUS] = unit
        gamma[mu][PLUS, MINUS] = -unit.conj().T

    dvol = gamma[0] @ gamma[1] @ gamma[2] @ gamma[3]
    if dvol[0, 0].real > 0:
        LOGGER.debug("Flipping volume form sign so that dvol acts as -1 on S+")
        dvol = -dvol
    gamma[4] = 1j * dvol

    weyl_plus = np.zeros((4, 4), dtype=np.complex128)
    weyl_plus[PLUS, PLUS] = identity2
    weyl_minus = np.eye(4, dtype=np.complex128) - weyl_plus

    products = np.stack([gamma[i] @ gamma[j] for i, j in PAIRS])
    selfdual_plus = np.einsum("kp,pab->kab", 1j * SELFDUAL_BASIS, products)[:, PLUS, PLUS]
    gram = np.einsum("jab,kba->jk", selfdual_plus, selfdual_plus).real
    selfdual_dual = np.einsum("kj,jab->kab", np.linalg.inv(gram), selfdual_plus)

    model = CliffordModel(
        gamma=_frozen(gamma),
        weyl_plus=_frozen(weyl_plus),
        weyl_minus=_frozen(weyl_minus),
        dvol4=_frozen(dvol),
        pair_products=_frozen(products),
        selfdual_plus=_frozen(selfdual_plus),
        selfdual_dual=_frozen(selfdual_dual),
        conjugation=_frozen(_conjugation_intertwiner(gamma[:4])),
    )
    LOGGER.debug("Built Clifford model")
    return model


def gamma_vector(
    v: ArrayLike, chirality: GammaRestriction = "full"
) -> ComplexArray:
    """Clifford action of a real 4-vector.

    ``restricted`` returns the 2×2 block mapping ``S+`` to ``S-``.
    """
    vector = np.asarray(v, dtype=np.float64)
    if vector.shape != (4,):
        raise ValueError(f"expected a real 4-vector, got shape {vector.shape}")
    model = build_clifford_model()
    matrix = np.einsum("m,mab->ab", vector, model.gamma4)
    if chirality == "restricted":
        return np.asarray(matrix[MINUS, PLUS])
    if chirality != "full":
        raise ValueError(f"Unsupported chirality restriction: {chirality}")
    return np.asarray(matrix)


def gamma_two_form_matrices(coeffs: ArrayLike) -> ComplexArray:
    """``γ(ω)`` for coefficient arrays of shape ``(..., 6)``."""
    model = build_clifford_model()
    return np.einsum("...p,pab->...ab", np.asarray(coeffs), model.pair_products)


def gamma_two_form(omega: TwoFormFibre) -> ComplexArray:
    return gamma_two_form_matrices(omega.coeffs)


def antisymmetric_matrix(coeffs: ArrayLike) -> NDArray[Any]:
    """Expand ``(..., 6)`` pair coefficients into antisymmetric ``(..., 4, 4)`` matrices."""
    values = np.asarray(coeffs)
    matrix = np.zeros(values.shape[:-1] + (4, 4), dtype=values.dtype)
    for p, (i, j) in enumerate(PAIRS):
        matrix[..., i, j] = values[..., p]
        matrix[..., j, i] = -values[..., p]
    return matrix


def hodge_star_values(coeffs: ArrayLike) -> ComplexArray:
    return np.einsum("pq,...q->...p", HODGE, np.asarray(coeffs, dtype=np.complex128))


def hodge_star(omega: TwoFormFibre) -> TwoFormFibre:
    return TwoFormFibre(hodge_star_values(omega.coeffs), omega.value_class)


def selfdual_split_values(coeffs: ArrayLike) -> tuple[ComplexArray, ComplexArray]:
    values = np.asarray(coeffs, dtype=np.complex128)
    starred = hodge_star_values(values)
    return 0.5 * (values + starred), 0.5 * (values - starred)


def selfdual_split(omega: TwoFormFibre) -> tuple[TwoFormFibre, TwoFormFibre]:
    plus, minus = selfdual_split_values(omega.coeffs)
    return TwoFormFibre(plus, omega.value_class), TwoFormFibre(minus, omega.value_class)


def kahler_form() -> TwoFormFibre:
    """Real self-dual form ``ω`` with ``γ(iω) = 2 diag(1, -1)`` on ``S+``."""
    model = build_clifford_model()
    target = 2.0 * PAULI[2]
    for row in model.sd_basis:
        if np.allclose(gamma_two_form_matrices(1j * row)[PLUS, PLUS], target):
            return TwoFormFibre(row.astype(np.complex128), "real")
    raise RuntimeError("no self-dual basis form acts as 2·diag(1, -1) on S+")


def sigma_bilinear_coefficients(phi: ArrayLike, chi: ArrayLike) -> RealArray:
    """Self-dual coefficients of the polarised map ``σ(φ, χ)``, shape ``(..., 3)``.

    ``σ(φ, χ) = i Σ_k c_k s_k`` where ``s_k`` runs over ``sd_basis``.
    """
    model = build_clifford_model()
    left = np.asarray(phi, dtype=np.complex128)
    right = np.asarray(chi, dtype=np.complex128)
    return np.real(np.einsum("...a,kab,...b->...k", left.conj(), model.selfdual_dual, right))


def sigma_coefficients(phi: ArrayLike) -> RealArray:
    return sigma_bilinear_coefficients(phi, phi)


def selfdual_values(coefficients: ArrayLike) -> ComplexArray:
    """Imaginary self-dual coefficients ``i Σ_k c_k s_k`` in ``PAIRS`` order."""
    return 1j * np.einsum("...k,kp->...p", np.asarray(coefficients), SELFDUAL_BASIS)


def selfdual_coefficients(coeffs: ArrayLike) -> RealArray:
    """Inverse of :func:`selfdual_values` on imaginary self-dual forms."""
    values = np.asarray(coeffs, dtype=np.complex128)
    return np.real(np.einsum("...p,kp->...k", -1j * values, SELFDUAL_BASIS)) / 2.0


def sigma(phi: ArrayLike) -> TwoFormFibre:
    """Quadratic map with ``γ(σ(φ))|S+ = φφ† - ½|φ|² Id``."""
    value = np.asarray(phi, dtype=np.complex128)
    if value.shape != (2,):
        raise ValueError(f"sigma expects a Weyl value with 2 components, got {value.shape}")
    return TwoFormFibre(selfdual_values(sigma_coefficients(value)), "imaginary")


def two_form_from_plus_endomorphism(matrix: ArrayLike) -> TwoFormFibre:
    """Imaginary self-dual form acting on ``S+`` as the given Hermitian trace-free matrix."""
    model = build_clifford_model()
    target = np.asarray(matrix, dtype=np.complex128)
    gram = np.einsum("jab,kba->jk", model.selfdual_plus, model.selfdual_plus).real
    rhs = np.einsum("kab,ba->k", model.selfdual_plus, target).real
    coefficients = np.linalg.solve(gram, rhs)
    return TwoFormFibre(selfdual_values(coefficients), "imaginary")


def sigma_cubic_check(phi: ArrayLike) -> tuple[WeylValue, WeylValue]:
    value = np.asarray(phi, dtype=np.complex128)
    action = gamma_two_form(sigma(value))[PLUS, PLUS] @ value
    return action, 0.5 * float(np.vdot(value, value).real) * value


def _require_imaginary_selfdual(tau: TwoFormFibre, atol: float) -> None:
    _, minus = selfdual_split_values(tau.coeffs)
    if np.max(np.abs(tau.coeffs.real), initial=0.0) > atol or np.max(
        np.abs(minus), initial=0.0
    ) > atol:
        raise ValueError("expected an imaginary self-dual two-form")


def kernel_dichotomy_check(tau: TwoFormFibre, phi: ArrayLike, atol: float = 1e-12) -> bool:
    """True when ``γ(τ)φ = 0`` happens exactly when ``τ = 0`` or ``φ = 0``."""
    _require_imaginary_selfdual(tau, atol)
    value = np.asarray(phi, dtype=np.complex128)
    tau_norm = np.sqrt(tau.norm_sq())
    phi_norm = float(np.linalg.norm(value))
    image = gamma_two_form(tau)[PLUS, PLUS] @ value
    scale = max(1.0, tau_norm * phi_norm)
    vanishes = float(np.linalg.norm(image)) <= atol * scale
    trivial = tau_norm <= atol or phi_norm <= atol
    return vanishes == trivial


def charge_conjugate_fibre(phi: ArrayLike, inverse: bool = False) -> ComplexArray:
    """Anti-linear map ``J φ = C φ̄`` commuting with real Clifford multiplication.

    Works on arrays of shape ``(..., 4)`` or, using the ``S±`` block, ``(..., 2)``.
    ``J² = -Id``; ``inverse=True`` applies ``J⁻¹ = -J``.
    """
    model = build_clifford_model()
    value = np.asarray(phi, dtype=np.complex128)
    if value.shape[-1] == 4:
        matrix = model.conjugation
    elif value.shape[-1] == 2:
        matrix = model.conjugation[PLUS, PLUS]
    else:
        raise ValueError(f"spinor values need 2 or 4 components, got {value.shape[-1]}")
    result = np.einsum("ab,...b->...a", matrix, value.conj())
    return -result if inverse else result


@dataclass(slots=True)
class IdentityCheck:
    name: str
    max_deviation: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_deviation) and self.max_deviation <= self.threshold)


@dataclass(slots=True)
class IdentityReport:
    seed: int
    trials: int
    checks: list[IdentityCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "checks": [
                {
                    "name": check.name,
                    "max_deviation": check.max_deviation,
                    "threshold": check.threshold,
                    "passed": check.passed,
                }
                for check in self.checks
            ],
        }


def _random_complex(rng: np.random.Generator, *shape: int) -> ComplexArray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _max_abs(values: ArrayLike) -> float:
    return float(np.max(np.abs(values), initial=0.0))


def identity_suite(seed: int, trials: int, threshold: float = 1e-12) -> IdentityReport:
    """Check the fibrewise Clifford identities on random samples."""
    if trials < 1:
        raise ValueError(f"identity suite needs at least one trial, got {trials}")
    model = build_clifford_model()
    rng = np.random.default_rng(seed)
    eye4 = np.eye(4)

    anticommutator = max(
        _max_abs(
            model.gamma[a] @ model.gamma[b]
            + model.gamma[b] @ model.gamma[a]
            + 2.0 * (a == b) * eye4
        )
        for a in range(5)
        for b in range(5)
    )

    vectors = rng.standard_normal((trials, 4))
    gamma_v = np.einsum("tm,mab->tab", vectors, model.gamma4)
    vector_square = _max_abs(
        gamma_v @ gamma_v + np.sum(vectors**2, axis=1)[:, None, None] * eye4
    )

    dirac = _random_complex(rng, trials, 4)
    plus = np.einsum("ab,tb->ta", model.weyl_plus, dirac)
    minus = np.einsum("ab,tb->ta", model.weyl_minus, dirac)
    dvol_weyl = max(
        _max_abs(np.einsum("ab,tb->ta", model.dvol4, plus) + plus),
        _max_abs(np.einsum("ab,tb->ta", model.dvol4, minus) - minus),
    )
    vertical = _max_abs(np.einsum("ab,tb->ta", model.gammaK, plus) + 1j * plus)

    asd = rng.standard_normal((trials, 3)) @ ANTISELFDUAL_BASIS
    asd_plus = _max_abs(gamma_two_form_matrices(asd + 0j)[:, PLUS, PLUS])

    weyl = _random_complex(rng, trials, 2)
    tau_coeffs = selfdual_values(rng.standard_normal((trials, 3)))
    tau_norm_sq = np.sum(np.abs(tau_coeffs) ** 2, axis=1)
    tau_plus = gamma_two_form_matrices(tau_coeffs)[:, PLUS, PLUS]
    tau_square = _max_abs(
        np.einsum("tab,tbc,tc->ta", tau_plus, tau_plus, weyl)
        - 2.0 * tau_norm_sq[:, None] * weyl
    )

    forms = rng.standard_normal((trials, 6)) * 1j
    antisym = antisymmetric_matrix(forms)
    contracted = np.einsum("tlj,lab,jbc->tac", antisym, model.gamma4, model.gamma4)
    trace_formula = _max_abs(contracted - 2.0 * gamma_two_form_matrices(forms))

    sigma_plus = gamma_two_form_matrices(selfdual_values(sigma_coefficients(weyl)))[
        :, PLUS, PLUS
    ]
    norm_sq = np.sum(np.abs(weyl) ** 2, axis=1)
    sigma_cubic = _max_abs(
        np.einsum("tab,tb->ta", sigma_plus, weyl) - 0.5 * norm_sq[:, None] * weyl
    )
    outer = np.einsum("ta,tb->tab", weyl, weyl.conj()) - 0.5 * norm_sq[:, None, None] * np.eye(2)
    sigma_outer = _max_abs(sigma_plus - outer)

    hermitian = _random_complex(rng, trials, 2, 2)
    hermitian = hermitian + np.conj(np.swapaxes(hermitian, 1, 2))
    hermitian = hermitian - 0.5 * np.einsum("tii->t", hermitian)[:, None, None] * np.eye(2)
    roundtrip = max(
        _max_abs(gamma_two_form(two_form_from_plus_endomorphism(m))[PLUS, PLUS] - m)
        for m in hermitian
    )

    dichotomy = _max_abs(
        np.sum(np.abs(np.einsum("tab,tb->ta", tau_plus, weyl)) ** 2, axis=1)
        - 2.0 * tau_norm_sq * norm_sq
    ) / max(1.0, float(np.max(tau_norm_sq * norm_sq)))

    conj = charge_conjugate_fibre(dirac)
    intertwining = _max_abs(
        np.einsum("tab,tb->ta", gamma_v, conj)
        - charge_conjugate_fibre(np.einsum("tab,tb->ta", gamma_v, dirac))
    )
    isometry = _max_abs(
        np.linalg.norm(conj, axis=1) - np.linalg.norm(dirac, axis=1)
    )
    inverse = _max_abs(charge_conjugate_fibre(conj, inverse=True) - dirac)

    checks = [
        IdentityCheck("clifford-relations", anticommutator, threshold),
        IdentityCheck("vector-square", vector_square / max(1.0, float(np.max(np.sum(vectors**2, axis=1)))), threshold),
        IdentityCheck("dvol-on-weyl", dvol_weyl, threshold),
        IdentityCheck("vertical-on-plus", vertical, threshold),
        IdentityCheck("antiselfdual-kills-plus", asd_plus, threshold),
        IdentityCheck("selfdual-square", tau_square / max(1.0, float(np.max(tau_norm_sq))), threshold),
        IdentityCheck("trace-formula", trace_formula, threshold),
        IdentityCheck("sigma-cubic", sigma_cubic / max(1.0, float(np.max(norm_sq))), threshold),
        IdentityCheck("sigma-outer-product", sigma_outer, threshold),
        IdentityCheck("sigma-roundtrip", roundtrip, threshold),
        IdentityCheck("kernel-dichotomy", dichotomy, threshold),
        IdentityCheck("conjugation-intertwines", intertwining, threshold),
        IdentityCheck("conjugation-isometry", isometry, threshold),
        IdentityCheck("conjugation-inverse", inverse, threshold),
    ]
    for check in checks:
        LOGGER.debug("Identity %s: max deviation %.3e", check.name, check.max_deviation)
    return IdentityReport(seed=seed, trials=trials, checks=checks)


__all__ = [
    "ANTISELFDUAL_BASIS",
    "antisymmetric_matrix",
    "CliffordModel",
    "DiracValue",
    "HODGE",
    "IdentityCheck",
    "IdentityReport",
    "MINUS",
    "PAIRS",
    "PAULI",
    "PLUS",
    "SELFDUAL_BASIS",
    "TwoFormFibre",
    "WeylValue",
    "build_clifford_model",
    "charge_conjugate_fibre",
    "classify_values",
    "gamma_two_form",
    "gamma_two_form_matrices",
    "gamma_vector",
    "hodge_star",
    "hodge_star_values",
    "identity_suite",
    "kahler_form",
    "kernel_dichotomy_check",
    "selfdual_coefficients",
    "selfdual_split",
    "selfdual_split_values",
    "selfdual_values",
    "sigma",
    "sigma_bilinear_coefficients",
    "sigma_coefficients",
    "sigma_cubic_check",
    "two_form_from_plus_endomorphism",
]
