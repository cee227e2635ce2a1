"""Mixed maximally entangled states in ``d (x) d'`` systems (``d' >= 2d``).

Submodules:

- :mod:`~mmes_lab.qmat` -- bipartite linear algebra and state types
- :mod:`~mmes_lab.measures` -- entropy, negativity, fully entangled fraction
- :mod:`~mmes_lab.weyl` -- shift/clock operators and generalized Bell states
- :mod:`~mmes_lab.mmes` -- construction and certification
- :mod:`~mmes_lab.teleport` -- teleportation simulation
- :mod:`~mmes_lab.channels` -- Kraus channels and the XXZ preparation model
- :mod:`~mmes_lab.locc` -- single-setting LOCC discrimination
- :mod:`~mmes_lab.cli` -- ``mmes-lab`` command line
"""

from .channels import KrausChannel, OneSidedChannel, apply_one_sided, block_swap_channel, make_channel
from .locc import LoccDiscriminator, chi_state, discriminate, sample_run
from .measures import FullyEntangledFraction, fully_entangled_fraction, negativity, von_neumann_entropy
from .mmes import MmesCertifier, MmesSpec, construct_mmes, is_mmes
from .qmat import DensityMatrix, PureState
from .teleport import simulate_mmes_teleport
from .weyl import WeylIndex, generalized_bell, weyl_unitary

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "PureState",
    "WeylIndex",
    "weyl_unitary",
    "generalized_bell",
    "MmesSpec",
    "construct_mmes",
    "is_mmes",
    "MmesCertifier",
    "negativity",
    "von_neumann_entropy",
    "fully_entangled_fraction",
    "FullyEntangledFraction",
    "simulate_mmes_teleport",
    "KrausChannel",
    "make_channel",
    "block_swap_channel",
    "apply_one_sided",
    "OneSidedChannel",
    "chi_state",
    "discriminate",
    "sample_run",
    "LoccDiscriminator",
]
