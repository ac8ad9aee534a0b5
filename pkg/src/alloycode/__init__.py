"""Random p-adic alloy codes for straggler-tolerant matrix multiplication."""
from .alloy import AlloyPlan, alloy_for_shape, encode_tasks, plan, run
from .blocks import BlockPartition, assemble, split
from .channel import ChannelConfig, simulate_round
from .decomp import TensorDecomposition, strassen, trivial, verify
from .ep import EpCode, ep_decode, ep_encode, ep_threshold
from .field import ScalarMode, rank, solve
from .padic import NeedMoreRows, PadicDistribution, decode, generate_codebook, success_probability
from .simulation import estimate_threshold, make_scheme

__all__ = [
    "AlloyPlan", "BlockPartition", "ChannelConfig", "EpCode", "NeedMoreRows", "PadicDistribution",
    "ScalarMode", "TensorDecomposition", "alloy_for_shape", "assemble", "decode", "encode_tasks",
    "ep_decode", "ep_encode", "ep_threshold", "estimate_threshold", "generate_codebook", "make_scheme",
    "plan", "rank", "run", "simulate_round", "solve", "split", "strassen", "success_probability",
    "trivial", "verify",
]
