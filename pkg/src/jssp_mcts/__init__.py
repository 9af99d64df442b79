"""Job-shop scheduling with greedy dispatch rules, the Pilot method and
Monte-Carlo tree search under fixed rollout budgets."""

from .instance import Instance, generate_instance, load_instance, parse_instance, save_instance, write_instance
from .rules import DispatchRule
from .schedule import PartialSchedule, Solution, verify_schedule
from .solvers import Algorithm, RunResult, SolverConfig, solve

__all__ = [
    "Algorithm",
    "DispatchRule",
    "Instance",
    "PartialSchedule",
    "RunResult",
    "Solution",
    "SolverConfig",
    "generate_instance",
    "load_instance",
    "parse_instance",
    "save_instance",
    "solve",
    "verify_schedule",
    "write_instance",
]
