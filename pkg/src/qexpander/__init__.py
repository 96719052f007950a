"""Spectral expansion, mixing-lemma checks and witness extraction for unitary-mixture channels."""
from .channel import (Channel, LinearMap, apply, as_map, deflated_map, induced_norm,
                      reduced_spectral_radius, superoperator, unit_eigen_multiplicity)
from .errors import (ContractViolation, DegenerateChannel, DimensionError, DomainError,
                     PreconditionError, QExpanderError, ResourceError, ValidationError)
from .generators import (RegularGraph, cyclic_cayley_channel, random_channel,
                         random_regular_graph, weyl_channel)
from .witness import classical_subset_witnesses, mixing_witnesses

__version__ = "0.1.0"
