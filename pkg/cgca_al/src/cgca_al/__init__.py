"""Convolutional graph cross-attention attack localization: learns
per-line attack probabilities from PCPA scenario datasets and exports
them as diagnosis priors."""

from .data import (DataError, GraphSpec, N_FEATURES, ScenarioBatch,
                   load_dataset, load_graph_spec, normalization_stats,
                   read_shard, scenario_features)
from .layers import (GatCnnLayer, GraphAttention, LongRangeConv,
                     MultiHeadCrossAttention)
from .model import CgcaAl, ModelConfig, load_checkpoint, save_checkpoint
from .train import (TrainConfig, TrainResult, evaluate_f1, f1_score, predict,
                    train)
from .export import export_prior, load_prior, prior_document, prior_for_scenario

__version__ = "0.1.0"
