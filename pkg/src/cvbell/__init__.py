"""Bell-CHSH violation of two-mode squeezed vacuum with degeneracy-truncated pseudospins."""

from .bell import (
    TSIRELSON,
    BellAngles,
    BellValue,
    CorrelatorPair,
    bell_expectation,
    bell_operator,
    biqv_curve,
    closed_form_correlators,
    correlators_observable_picture,
    correlators_state_picture,
    maximal_bell_value,
)
from .fock import (
    FockOperator,
    ModeCutoff,
    TwoModeState,
    annihilation,
    auto_cutoff,
    commutator,
    creation,
    expectation,
    operator_exponential,
    tensor,
)
from .parity import (
    QuadratureScheme,
    parity_f_closed,
    parity_f_quadrature,
    parity_z_operator,
    sign_position_operator,
)
from .pseudospin import FULL, Direction, SpinTriple, degeneracy_count, make_pseudospin, spin_projection
from .squeeze import (
    apply_pair_creation_exponential,
    conjugate_observable,
    squeeze_unitary,
    tmsv_amplitudes,
    truncation_weight,
)

__version__ = "0.1.0"
