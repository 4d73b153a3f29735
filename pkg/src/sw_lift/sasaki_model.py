"""Fibrewise model of Kähler-Einstein surfaces and their Sasaki circle bundles.

Everything here is evaluated at a single model point: the Kähler-Einstein
solution has a constant spinor ``φ₀`` and parallel curvature, so the
Seiberg-Witten system reduces to ``2×2`` matrix identities on ``S+``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray

from .clifford import PAULI, PLUS, TwoFormFibre, gamma_two_form, kahler_form, sigma
from .kaluza_klein.ricci import ricci_kk_matrix

LOGGER = logging.getLogger(__name__)

Structure = Literal["canonical", "conjugate"]
STRUCTURES: tuple[Structure, ...] = ("canonical", "conjugate")


@dataclass(frozen=True, slots=True)
class KEParameters:
    """Einstein constant ``λ``, perturbation scale ``t`` and Spin^c structure.

    ``canonical`` needs ``t < -λ``, ``conjugate`` needs ``t > λ``. ``spin``
    selects the radius row for the square root of the canonical bundle.
    """

    lam: float
    t: float = 0.0
    structure: Structure = "canonical"
    spin: bool = False

    def __post_init__(self) -> None:
        if self.lam == 0.0 or not np.isfinite(self.lam):
            raise ValueError(f"Einstein constant must be finite and non-zero, got {self.lam}")
        if self.structure not in STRUCTURES:
            raise ValueError(f"Unsupported structure: {self.structure}")
        if self.structure == "canonical" and not self.t < -self.lam:
            raise ValueError(f"canonical structure needs t < -λ, got λ={self.lam}, t={self.t}")
        if self.structure == "conjugate" and not self.t > self.lam:
            raise ValueError(f"conjugate structure needs t > λ, got λ={self.lam}, t={self.t}")

    @property
    def sign(self) -> int:
        """``+1`` for the canonical structure, ``-1`` for its conjugate."""
        return 1 if self.structure == "canonical" else -1

    @property
    def charge(self) -> float:
        """Charge of the lift: ``±½`` without a spin structure, ``±1`` with one."""
        return self.sign * (1.0 if self.spin else 0.5)


def default_perturbation(lam: float, structure: Structure) -> float:
    """``t = 0`` when allowed, otherwise one unit inside the admissible range."""
    if structure == "canonical":
        return 0.0 if 0.0 < -lam else -lam - 1.0
    return 0.0 if 0.0 > lam else lam + 1.0


@dataclass(frozen=True, slots=True)
class KESolution:
    phi0: NDArray[np.complex128]
    gamma_curvature: NDArray[np.complex128]
    gamma_sigma: NDArray[np.complex128]
    gamma_mu: NDArray[np.complex128]

    def curvature_defect(self) -> float:
        """``max |γ(F⁺) - γ(σ) - γ(μ)|``, zero on a solution."""
        return float(np.max(np.abs(self.gamma_curvature - self.gamma_sigma - self.gamma_mu)))


def ke_solution(p: KEParameters) -> KESolution:
    omega = kahler_form()
    gamma_mu = gamma_two_form(omega.scaled(1j * p.t))[PLUS, PLUS]
    if p.structure == "canonical":
        phi0 = np.array([2.0 * np.sqrt(-p.lam - p.t), 0.0], dtype=np.complex128)
    else:
        phi0 = np.array([0.0, 2.0 * np.sqrt(p.t - p.lam)], dtype=np.complex128)
    gamma_curvature = -2.0 * p.sign * p.lam * PAULI[2]
    gamma_sigma = gamma_two_form(sigma(phi0))[PLUS, PLUS]
    solution = KESolution(phi0, gamma_curvature, gamma_sigma, gamma_mu)
    LOGGER.debug(
        "KE solution %s λ=%g t=%g: curvature defect %.3e",
        p.structure,
        p.lam,
        p.t,
        solution.curvature_defect(),
    )
    return solution


def eigenvalue_case_table(p: KEParameters) -> float:
    """The four printed cases for the eigenvalue of ``D^Y`` on the lifted spinor."""
    size = abs(p.lam) / 4.0
    if p.structure == "canonical":
        return 1.0 - size if p.lam < 0 else -(1.0 + size)
    return 1.0 + size if p.lam > 0 else -(1.0 - size)


@dataclass(frozen=True, slots=True)
class LiftedEigenvalue:
    mass: float
    norm_sq: float
    nu_table: float
    nu_formula: float
    nu_reduced: float
    mass_from_radius: float

    @property
    def max_disagreement(self) -> float:
        return max(abs(self.nu_table - self.nu_formula), abs(self.nu_table - self.nu_reduced))

    @property
    def sign_consistent(self) -> bool:
        return bool(np.isclose(self.mass, self.mass_from_radius, rtol=1e-12, atol=0.0))


def lifted_eigenvalue(p: KEParameters) -> LiftedEigenvalue:
    """Eigenvalue ``ν`` of ``D^Y`` on ``ψ = lift(φ₀)`` by three routes.

    The table, the cubic equation ``ν = -|ψ|²/(16m) + m - (γ(μ)-eigenvalue)/(8m)``
    and the reduced Dirac operator ``m - γ(F⁺)/(8m)`` applied to ``φ₀``.
    """
    solution = ke_solution(p)
    mass = -p.sign * abs(p.lam) / 4.0
    phi0 = solution.phi0
    norm_sq = float(np.vdot(phi0, phi0).real)
    mu_eigen = float(np.vdot(phi0, solution.gamma_mu @ phi0).real / norm_sq)
    nu_formula = -norm_sq / (16.0 * mass) + mass - mu_eigen / (8.0 * mass)
    reduced = mass * phi0 - solution.gamma_curvature @ phi0 / (8.0 * mass)
    nu_reduced = float(np.vdot(phi0, reduced).real / norm_sq)
    radius = sasaki_radius(p.lam, p.spin)
    result = LiftedEigenvalue(
        mass=mass,
        norm_sq=norm_sq,
        nu_table=eigenvalue_case_table(p),
        nu_formula=nu_formula,
        nu_reduced=nu_reduced,
        mass_from_radius=-p.charge / radius,
    )
    if not result.sign_consistent:
        LOGGER.warning(
            "Mass %.6g from the eigenvalue table differs from -q/r = %.6g",
            result.mass,
            result.mass_from_radius,
        )
    return result


def harmonic_residual(p: KEParameters) -> float:
    """``-|ψ|²/(16m) + m ∓ t/(4m)``; vanishes exactly on harmonic lifts."""
    mass = -p.sign * abs(p.lam) / 4.0
    norm_sq = 4.0 * (-p.lam - p.t) if p.structure == "canonical" else 4.0 * (p.t - p.lam)
    return -norm_sq / (16.0 * mass) + mass - p.sign * p.t / (4.0 * mass)


def sasaki_radius(lam: float, spin: bool = False) -> float:
    if lam == 0.0:
        raise ValueError("λ = 0 has no Sasaki radius")
    return (4.0 if spin else 2.0) / abs(lam)


def _curvature_fibre(lam: float, spin: bool) -> TwoFormFibre:
    """``F_A = i c ω`` with ``|F_A|² = 2λ²`` (``λ²/2`` for the spin row)."""
    scale = lam / 2.0 if spin else lam
    return kahler_form().scaled(1j * scale)


@dataclass(slots=True)
class SasakiReport:
    lam: float
    spin: bool
    radius: float
    mass: float
    norm_sq: float
    nu: float
    alpha_g: float
    alpha_eta: float
    scal: float
    gap: float
    closed_form_deviation: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "spin": self.spin,
            "radius": self.radius,
            "mass": self.mass,
            "norm_sq": self.norm_sq,
            "nu": self.nu,
            "alpha_g": self.alpha_g,
            "alpha_eta": self.alpha_eta,
            "scal": self.scal,
            "gap": self.gap,
            "closed_form_deviation": self.closed_form_deviation,
        }


def sasaki_ricci(lam: float, spin: bool = False) -> NDArray[np.float64]:
    """Ricci tensor of ``Y`` in the frame ``(E_1..E_4, ξ)`` from the Kaluza-Klein formulas."""
    radius = sasaki_radius(lam, spin)
    return ricci_kk_matrix(_curvature_fibre(lam, spin), radius, lam * np.eye(4))


def sasaki_curvature_report(
    lam: float,
    spin: bool = False,
    structure: Structure = "canonical",
    t: float | None = None,
) -> SasakiReport:
    """η-Einstein data ``Ric = α_g g + α_η η⊗η`` together with the lifted eigenvalue."""
    if lam == 0.0:
        raise ValueError("λ = 0 is excluded")
    ricci = sasaki_ricci(lam, spin)
    alpha_g = float(np.mean(np.diag(ricci)[:4]))
    alpha_eta = float(ricci[4, 4] - alpha_g)
    scal = float(np.trace(ricci))
    off_diagonal = ricci - np.diag(np.diag(ricci))
    deviation = max(
        abs(alpha_g - (lam - 2.0)),
        abs(alpha_eta - (6.0 - lam)),
        abs(scal - 4.0 * (lam - 1.0)),
        float(np.max(np.abs(np.diag(ricci)[:4] - alpha_g))),
        float(np.max(np.abs(off_diagonal))),
    )
    params = KEParameters(
        lam, default_perturbation(lam, structure) if t is None else t, structure, spin
    )
    eigen = lifted_eigenvalue(params)
    report = SasakiReport(
        lam=lam,
        spin=spin,
        radius=sasaki_radius(lam, spin),
        mass=eigen.mass,
        norm_sq=eigen.norm_sq,
        nu=eigen.nu_table,
        alpha_g=alpha_g,
        alpha_eta=alpha_eta,
        scal=scal,
        gap=friedrich_gap(lam),
        closed_form_deviation=deviation,
    )
    LOGGER.debug("Sasaki report λ=%g spin=%s: %s", lam, spin, report.to_dict())
    return report


def friedrich_gap(lam: float) -> float:
    """``ν² - (5/16)·scal`` for ``ν = 1 + λ/4`` and ``scal = 4(λ-1)``."""
    return (1.0 + lam / 4.0) ** 2 - 1.25 * (lam - 1.0)


def friedrich_gap_closed(lam: float) -> float:
    return (lam - 6.0) ** 2 / 16.0


__all__ = [
    "KEParameters",
    "KESolution",
    "LiftedEigenvalue",
    "STRUCTURES",
    "SasakiReport",
    "Structure",
    "default_perturbation",
    "eigenvalue_case_table",
    "friedrich_gap",
    "friedrich_gap_closed",
    "harmonic_residual",
    "ke_solution",
    "lifted_eigenvalue",
    "sasaki_curvature_report",
    "sasaki_radius",
    "sasaki_ricci",
]
