"""Transducer machines, the simulation rule system and the DTM front end."""
from .build import Reduction, ReductionError, build_macros, build_reduction
from .dtm import (DtmConfig, DtmError, DtmSpec, Encoding, encode_dtm, format_dtm, parse_dtm,
                  toy_dtm)
from .incr import make_inc_transducers
from .machine import (MachineError, MachineRun, TransducerMachine, check_zero_dead_end,
                      format_machine, parse_machine, simulate_machine, toy_machines)

__all__ = ["DtmConfig", "DtmError", "DtmSpec", "Encoding", "encode_dtm", "format_dtm", "parse_dtm",
           "toy_dtm", "Reduction", "ReductionError", "build_macros", "build_reduction", "make_inc_transducers",
           "MachineError", "MachineRun", "TransducerMachine", "check_zero_dead_end",
           "format_machine", "parse_machine", "simulate_machine", "toy_machines"]
