"""Coupled-channel scattering of an ultracold two-level atom through a
single-mode cavity (the one-photon mazer), with detuning.

Units: hbar = 1, default mass 1/2. Detuning is ``delta = omega_atom - omega_cavity``.
"""

from .claimcheck import (
    ClaimReport,
    Verdict,
    run_all_claims,
    verify_derivative_relations,
    verify_mesa_decoupling,
    verify_solver_equivalence,
    verify_trig_identities,
    verify_vanishing_claim,
)
from .dressed import (
    BareVector2,
    DressedPoint,
    ManifoldParams,
    dressed_point,
    dressed_vectors,
    eigenvalues,
    mixing_angle,
    potential_matrix,
    theta_derivatives,
    trig_pair,
)
from .errors import (
    ArityError,
    DegeneratePoint,
    DomainError,
    MazerError,
    NonConvergent,
    ParseError,
    SingularMatching,
    StiffnessWarning,
    UnknownIdentifier,
)
from .jets import Jet2
from .modefn import ModeExpr, eval012, parse, unparse
from .scatter import (
    ScatterConfig,
    ScatterResult,
    Variant,
    channel_momenta,
    emission_probability,
    mesa_scatter,
    numeric_scatter_bare,
    numeric_scatter_dressed,
)

__version__ = "0.1.0"
