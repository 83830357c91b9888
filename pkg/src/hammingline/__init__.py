"""Constant-rate quantum memory on a line.

A library and CLI that constructs a tower of interleaved-concatenated
quantum Hamming codes, compiles its fault-tolerant gadgets to strictly
nearest-neighbor stabilizer circuits on a line of qubits, simulates them
under depolarizing noise, decodes hierarchically, and machine-checks the
base-case fault-tolerance properties by exhaustive fault enumeration.
"""

__version__ = "0.1.0"

from .pauli import PauliString, pauli_compose, pauli_commutes, conjugate_by_cnot
from .tableau import Tableau, tableau_simulate
from .circuit import Circuit, CircuitWriter, check_locality, circuit_to_text, circuit_from_text
