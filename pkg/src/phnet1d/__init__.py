"""Structure-preserving discretization of 1D port-Hamiltonian systems.

Each mesh element becomes a 4th-order lumped port-Hamiltonian system whose
Dirac structure is built from exact integrals of fixed shape functions; the
elements are chained into a sparse aggregate model that keeps the power
balance and matches the stored energy of the distributed system.
"""

from .mesh import Domain, Element, Mesh, build_mesh, build_uniform_mesh, element_of
from .shape_functions import (ShapeKind, ShapeSet, build_shape_set, evaluate,
                              normalization_report)
from .element_matrices import (DiracPair, ElementMatrices, ElementModel,
                               build_dirac_pair, compute_matrices,
                               element_model, element_state_space)
from .hamiltonian import (EnergyDensity, ElementState, element_gradient,
                          element_hamiltonian, quadratic_density,
                          quartic_density)
from .assembly import (AggregateModel, compose_chain, io_map_description,
                       sparsity_report)
from .simulate import (Scenario, SimulationResult, gradient_stack, run,
                       sine_pulse, step, zero_signal)

__version__ = "0.1.0"
