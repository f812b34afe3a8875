"""Achievability and Shannon lower bounds for SNR and energy per bit in slotted-ALOHA random access."""
from .errors import DomainError, InfeasibleSpecError, NoSolutionError, SimulationUnstable
from .fbl import (
    CodePoint,
    from_db,
    pe_normal_approx,
    q_function,
    snr_from_ebn0_retx,
    snr_to_ebn0,
    to_db,
)
from .solvers import Solution, SolverOptions, Task, TaskSpec, convert_solution, solve

__version__ = "0.1.0"
