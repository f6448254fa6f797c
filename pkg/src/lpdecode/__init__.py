"""Adaptive LP decoding of binary linear codes with cut-generating redundant parity checks."""
from .codes import code_rate, gallager_regular, hamming74, load_code, tanner155
from .cuts import THETA, ParityCut, SolutionVector, brute_force_cut, cut_search
from .decoders import DecodeResult, DecoderConfig, Variant, decode, static_lp_decode
from .gf2 import BinaryMatrix, parse_alist, read_alist, to_alist, write_alist
from .reference import BpConfig, bp_decode, ml_decode
from .rpc import build_redundant_matrix, find_rpc_cuts
from .sim import ChannelConfig, FerReport, run_fer

__version__ = "0.1.0"
