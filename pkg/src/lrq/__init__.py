"""Lewis-Riesenfeld invariants for driven two-level, spin and fiber-optic models.

The package builds the operator algebra of a multiphoton Jaynes-Cummings
doublet, integrates the auxiliary equations for the invariant angles,
assembles dynamical and geometric phases, checks everything against a
brute-force propagator, and applies the same machinery to photon helicity
transport along a helical fiber.
"""

from .algebra import (
    FockRep,
    SpinRep,
    SubspaceRep,
    build_fock_rep,
    build_spin_rep,
    build_subspace_rep,
    falling_factorial_ratio,
    verify_spin_relations,
    verify_susy_relations,
)
from .drives import DriveParams, Profile, SpinDrive
from .errors import DomainError, InputError, LRQError, RangeError, SingularityError
from .fiber import (
    FiberPath,
    HelixSpec,
    explicit_U,
    fiber_geometric_phase,
    helicity_residual,
    helix_to_path,
    momentum_transport_check,
    verify_chiao_wu_invariance,
)
from .invariant import (
    InvariantTrajectory,
    build_invariant,
    build_V,
    invariant_residual,
    solve_auxiliary_jc,
    solve_auxiliary_spin,
    transform_hamiltonian,
)
from .oracle import audit_lower_branch, compare_branch, evolve_timestepped, exact_solution_jc
from .phase import PhaseRecord, cyclic_solid_angle, jc_phase, spin_phase

__version__ = "0.1.0"

__all__ = [
    "FockRep",
    "SpinRep",
    "SubspaceRep",
    "build_fock_rep",
    "build_spin_rep",
    "build_subspace_rep",
    "falling_factorial_ratio",
    "verify_spin_relations",
    "verify_susy_relations",
    "FiberPath",
    "HelixSpec",
    "explicit_U",
    "fiber_geometric_phase",
    "helicity_residual",
    "helix_to_path",
    "momentum_transport_check",
    "verify_chiao_wu_invariance",
    "InvariantTrajectory",
    "build_invariant",
    "build_V",
    "invariant_residual",
    "solve_auxiliary_jc",
    "solve_auxiliary_spin",
    "transform_hamiltonian",
    "__version__",
    "DriveParams",
    "Profile",
    "SpinDrive",
    "DomainError",
    "InputError",
    "LRQError",
    "RangeError",
    "SingularityError",
    "audit_lower_branch",
    "compare_branch",
    "evolve_timestepped",
    "exact_solution_jc",
    "PhaseRecord",
    "cyclic_solid_angle",
    "jc_phase",
    "spin_phase",
]
