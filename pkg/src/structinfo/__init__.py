"""Structural-information tools for exploration in reinforcement learning."""
from .agent import ConfigError, TrainConfig, train
from .encoding_tree import EncodingTree, optimize_two_layer, structural_entropy, stretch_delta
from .env import figure1_mdp, make_env
from .exploration import exact_vcse, intrinsic_rewards, knn_entropy
from .graph import JointDistribution, WeightedGraph, degree_realization
from .harness import ExperimentConfig, load_config, run
from .structural_mi import smi_by_definition, smi_closed_form

__version__ = "0.1.0"
