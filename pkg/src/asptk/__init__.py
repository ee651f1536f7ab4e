"""Fourier matrices, fast factorizations and orthogonal transforms for
polynomial signal models (DFT, DCT-III, hexagonal lattice, A2 and C2
Chebyshev models)."""

from .chebyshev import cheb_expand, cheb_matrix_theta, h_matrices, shift_matrices
from .fastfactor import (
    FactorPlan,
    basischange_a2,
    basischange_c2,
    factor_bottom_up,
    factor_top_down,
    recursive_plan,
    verify_plan,
)
from .models import build_model, fourier_dense, model_a2, model_c2, model_dct3, model_dft, model_hex
from .ortho import cd_context, cd_kernel, gj_diagonal, orthogonalize
from .polycore import MultiPoly, poly_eval
from .sparse import SparseMatrix
from .weyl import normalize_dominant, root_system

__version__ = "0.1.0"
