"""Simulation toolkit for the nine-register code on N-level registers."""

from .codes import (
    CodeSpec,
    build_nine_code,
    character_sum,
    copy_gate,
    dft_gate,
    dimension_bound,
    encode_flip,
    encode_nine,
    encode_nine_by_circuit,
    encode_pair_phase,
    encode_phase,
)
from .decoder import RecoveryOutcome, SyndromeRecord, recover
from .error_model import ErrorLabel, decompose, generate_group, make_P, make_Q, make_R
from .kl import KLReport, kl_check, single_register_error_set
from .tensor import (
    StateVec,
    apply_local,
    basis_state,
    fidelity_up_to_phase,
    inner_product,
    tensor,
    tensor_op,
)

__version__ = "0.1.0"
