"""Counting and estimating regular r-partite r-uniform hypergraphs."""

from .core import Params, Hypergraph, MultiHypergraph, Configuration, LogReal, RngStream, make_params
from .errors import (HypercountError, DomainError, BudgetExceeded, UnsupportedArity,
                     NumericalInstability, NonIntegralResult, RetriesExhausted,
                     InvalidSwitching, HypothesisViolated, CheckFailed)

__version__ = "0.1.0"
