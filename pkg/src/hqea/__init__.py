"""Quantum-inspired evolutionary optimization with Hadamard-walk search."""

from .algorithms import ALGORITHMS, CGAParams, OptimizerConfig, RunTrace, run_algorithm, run_cga, run_hqea, run_qea
from .knapsack import KnapsackInstance, brute_force_optimum, evaluate, generate_instance, repair
from .qea_core import QbitIndividual, SolutionBank, new_individual, observe, qea_update
from .qhw_search import SearchParams, local_search, qhw_refine, remote_search, select_individuals
from .quantum_walk import run_walk, sample_angle, to_angle_distribution, variance

__version__ = "0.1.0"
