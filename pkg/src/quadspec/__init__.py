"""Spectra of non-self-adjoint quadratic operator pencils on 2D/3D grids."""

__version__ = "0.1.0"

from .grid import GridKind, GridSpec, make_grid, node_coords  # noqa: E402
from .operators import SparseOperator  # noqa: E402
from .pencil import (  # noqa: E402
    CompanionMatrix,
    EigenPair,
    QuadraticPencil,
    ShiftedSolver,
    eigenpair,
    linearize,
    residual,
    shifted_solve,
)
from .dirichlet import (  # noqa: E402
    DirichletPencilConfig,
    assemble_dirichlet_pencil,
    assemble_laplacian,
    assemble_potential,
)
from .periodic import (  # noqa: E402
    CoefficientSpec,
    PeriodicPencilConfig,
    assemble_advection,
    assemble_periodic_laplacian,
    assemble_periodic_pencil,
)

__all__ = [
    "CoefficientSpec", "CompanionMatrix", "DirichletPencilConfig", "EigenPair", "GridKind",
    "GridSpec", "PeriodicPencilConfig", "QuadraticPencil", "ShiftedSolver", "SparseOperator",
    "assemble_advection", "assemble_dirichlet_pencil", "assemble_laplacian",
    "assemble_periodic_laplacian", "assemble_periodic_pencil", "assemble_potential",
    "eigenpair", "linearize", "make_grid", "node_coords", "residual", "shifted_solve",
]
