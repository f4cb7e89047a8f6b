"""Parallel cyber-physical attack (PCPA) simulation and diagnosis toolkit
for linearized power grids."""

from .grid import (GridError, GridTopology, Line, PartitionedView,
                   build_admittance, build_incidence, grid_from_dict,
                   grid_to_dict, load_grid, partition, save_grid)
from .caseparser import load_case, parse_case_file
from .dcflow import PowerFlowError, find_islands, line_flows, solve_dc
from .areas import (AreaError, AttackedArea, check_full_column_rank,
                    check_matching_cover, count_cycles, dbgs,
                    find_area_with_line_count, load_area, save_area)
from .attack import (AttackError, AttackSample, AttackScenario,
                     MeasurementSet, RebalanceError, apply_attack,
                     factor_to_x, rebalance_injections, sample_attack,
                     sample_loads, save_scenario, scenario_from_dict,
                     scenario_to_dict, simulate)
from .reconstruct import (ReconstructionError, ReconstructionReport,
                          detect_islanding, localize_attacked_buses,
                          reconstruct, reconstruct_p_H, reconstruct_theta_H)
from .lp import LinearProgramInstance, LPError, LPSolution, solve_lp
from .diagnosis import (DiagnosisError, DiagnosisResult, PriorMismatchError,
                        PriorVector, assemble_p2, brute_force_bip,
                        build_d_prime, diagnose, load_prior, oracle_prior,
                        save_prior, uniform_prior)
from .metrics import (ClassificationMetrics, MetricsError,
                      classification_metrics, labels_from_x,
                      normalized_error)
from .dataset import (DatasetConfig, DatasetError, EvaluationRecord,
                      evaluate_scenario, generate_dataset, read_shard,
                      run_experiment)

__version__ = "0.1.0"
