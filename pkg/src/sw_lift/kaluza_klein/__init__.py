"""The five-dimensional side: charge sectors on ``T⁴ × S¹`` and their Dirac operator."""

from .action import action_gradient, constant_length_eigenvalue, gross_neveu_action
from .connection import FrameConnection, frame_connection, nabla_Y, nabla_Y_lemma
from .dirac import (
    DecompositionReport,
    cubic_residual,
    dirac_Y,
    dirac_Y_frame,
    dirac_Y_reduced,
    residual_decomposition_check,
)
from .ricci import ricci_kk, ricci_kk_matrix, ricci_oracle
from .sector import (
    KKGeometry,
    SectorSpinor,
    charge_conjugate_sector,
    chirality_split,
    lift,
    sector_inner,
    unlift,
)

__all__ = [
    "DecompositionReport",
    "FrameConnection",
    "KKGeometry",
    "SectorSpinor",
    "action_gradient",
    "charge_conjugate_sector",
    "chirality_split",
    "constant_length_eigenvalue",
    "cubic_residual",
    "dirac_Y",
    "dirac_Y_frame",
    "dirac_Y_reduced",
    "frame_connection",
    "gross_neveu_action",
    "lift",
    "nabla_Y",
    "nabla_Y_lemma",
    "residual_decomposition_check",
    "ricci_kk",
    "ricci_kk_matrix",
    "ricci_oracle",
    "sector_inner",
    "unlift",
]
