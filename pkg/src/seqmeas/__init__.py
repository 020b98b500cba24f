"""Sequential products of quantum measurements.

Effects, states, operations (Kraus families), observables and instruments on
finite-dimensional Hilbert spaces, the four sequential-product flavors between
them, and a registry of executable law checks with a CLI front end.
"""

from . import effects, instruments, laws, matcore, observables, operations, serialize
from .effects import Effect, State
from .errors import SeqmeasError
from .instruments import Instrument
from .observables import Observable
from .operations import Operation

__all__ = [
    "Effect",
    "Instrument",
    "Observable",
    "Operation",
    "SeqmeasError",
    "State",
    "effects",
    "instruments",
    "laws",
    "matcore",
    "observables",
    "operations",
    "serialize",
]

__version__ = "0.1.0"
