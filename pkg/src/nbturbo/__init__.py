"""Non-binary turbo / LDPC codes over GF(2^m).

Construction, encoding, symbol-MAP (turbo) and FFT belief-propagation
decoding, AWGN Monte Carlo harness, and analytic block-error bounds.
"""

from .galois import DEFAULT_PRIMITIVE_POLYS, Field, NotPrimitiveError
from .pmf import (
    PmfUnderflowError,
    convolve,
    convolve_direct,
    iwht,
    normalize,
    permute_scalar,
    permute_scalar_inv,
    wht,
)
from .construction import (
    CodeSpec,
    ConfigError,
    PuncturePlan,
    SparseFieldMatrix,
    apply_mr,
    build_h_da,
    build_h_pccc,
    build_parity_check,
    combine_mr,
    gf_rank,
    make_puncture_plan,
    random_spec,
    read_alist,
    select_coefficients,
    spec_from_config,
    spec_to_config,
    write_alist,
)
from .interleave import (
    CycleGraph,
    Interleaver,
    build_cycle_graph,
    girth,
    girth_aware_interleaver,
    relative_prime_interleaver,
    spread_interleaver,
    tanner_girth,
)
from .encoding import (
    accumulate_tailbiting,
    encode,
    encode_da,
    encode_pccc,
    transmitted_symbols,
)
from .trellis import (
    DecodingFailure,
    ExtrinsicOutput,
    TrellisObservations,
    TurboResult,
    bcjr_tailbiting,
    bcjr_terminated,
    turbo_decode_parallel,
    turbo_decode_serial,
)
from .bp import BpResult, TannerGraph, bp_decode, syndrome_check
from .channel import ChannelModel, demodulate, modulate, transmit_frame
from .bounds import rcb_bound, spb_bound, bound_crossing

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
