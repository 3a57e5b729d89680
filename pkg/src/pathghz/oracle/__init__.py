"""Independent reference computations built only on the Fock and parameter layers."""

from .dense import Comparison, DenseKet, compare, dense_expand, occupations
from .histories import (
    detector_pair_operator,
    enumerate_pair_amplitudes,
    fanout_amplitudes,
    fanout_histories,
    pump_histories,
    walk,
)
from .topology import device_topology

__all__ = [
    "Comparison",
    "DenseKet",
    "compare",
    "dense_expand",
    "occupations",
    "detector_pair_operator",
    "enumerate_pair_amplitudes",
    "fanout_amplitudes",
    "fanout_histories",
    "pump_histories",
    "walk",
    "device_topology",
]
