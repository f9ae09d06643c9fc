"""Exact exterior-calculus engine for multisymplectic phase spaces."""

from .poly import (
    BundleMismatchError,
    Coordinate,
    CoordKind,
    CoordSystem,
    ENERGY,
    IncompletePointError,
    Point,
    Poly,
    base,
    fiber,
    jet_velocity,
    momentum,
)
from .exterior import (
    Form,
    KernelBasis,
    MultiVector,
    basis_vector,
    constant_form,
    contract,
    exterior_derivative,
    is_closed,
    kernel_at_point,
    lie_derivative,
    one_form,
    rational_nullspace,
    schouten,
    wedge,
)
from .phase import (
    Bundle,
    HorizontalNm1Form,
    ProjectableVF,
    ProjectabilityError,
    dnx_mu,
    dnx_munu,
    is_projectable_input,
    lift_cojet,
    lift_jet,
    make_bundle,
    momentum_map,
    momentum_map_closed_form,
    omega,
    theta,
    volume_form,
)
from .bracket import (
    BracketResult,
    CertificationError,
    GradedBracketMismatch,
    HamiltonianNm1Form,
    HamiltonianPair,
    NotHamiltonian,
    NotHamiltonianError,
    PoissonVerdict,
    UncertifiedPairError,
    bracket,
    bracket_coords,
    bracket_naive,
    build_hamiltonian_form,
    certify_pair,
    decide_hamiltonian,
    graded_bracket,
    graded_bracket_pair,
    graded_jacobi_sum,
    hamiltonian_vf,
    is_poisson_form,
    jacobi_defect,
    kernel_annihilates,
)

__version__ = "0.1.0"
