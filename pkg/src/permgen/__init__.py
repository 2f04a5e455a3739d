"""Probability that two random permutations of given cycle types generate
a transitive group, or one containing the alternating group."""

from .asymptotics import (INF, LimitParams, application_constant, expected_N_limit,
                          generation_probability_limit, sigma1_limit, split_constants)
from .expectation import (closed_form_p, enumerate_solutions, expected_orbit_count,
                          expected_orbit_total, transitive_pair_probability)
from .harness import (ExperimentConfig, ScaledSpec, build_cycle_type, compare_transitive_vs_alternating,
                      estimate_event, exact_report, random_class_experiment)
from .partitions import hardy_ramanujan, partition_count, sample_uniform_partition
from .perm import (CycleType, Permutation, class_size, compose, cycle_type, orbits, parity,
                   sample_with_cycle_type)
from .recognition import GroupClass, classify, contains_alternating, group_order, is_transitive

__version__ = "0.1.0"
