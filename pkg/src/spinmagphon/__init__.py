"""Simulator for a parametrically amplified spin-magnon-phonon hybrid system.

The package derives coupling and decay rates from experimental inputs, builds
the rotating-frame and squeezed-frame Hamiltonians with their Lindblad
dissipators, integrates the open-system dynamics on truncated Fock spaces,
and evaluates tripartite entanglement measures.  The ``spinmagphon`` command
line drives the figure pipelines and parameter sweeps.
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: F401
    SpaceLayout,
    annihilation,
    embed,
    hermitian_eigenvalues,
    hermitian_eigensystem,
    kron,
    matrix_exp,
    number_operator,
    partial_trace,
    partial_transpose,
    trace_norm,
)
from .model import (  # noqa: F401
    DerivedParams,
    Detunings,
    PhysicalParams,
    blue_detuning,
    build_hamiltonian_lab,
    build_hamiltonian_squeezed,
    cantilever_params,
    collapse_operators,
    derive_params,
    excitation_number,
    levitated_yig_params,
    occupation_operators,
    red_detuning,
    spin_magnon_exchange,
    squeeze_unitary,
    to_lambda_units,
    trapped_diamond_params,
)
from .dynamics import (  # noqa: F401
    CutoffPolicy,
    DynamicsError,
    EvolutionSpec,
    TraceDriftError,
    Trajectory,
    converged_evolve,
    evolve,
    expectation,
    liouvillian_apply,
    liouvillian_matrix,
)
from .entanglement import (  # noqa: F401
    Partition,
    all_partitions,
    dominant_pure_state,
    hyperdeterminant,
    log_negativity,
    min_residual_contangle,
    project_to_three_qubits,
    residual_contangle,
    three_tangle_pure,
)
from .constants import DEFAULT_CONSTANTS, constants_hash, load_constants  # noqa: F401
