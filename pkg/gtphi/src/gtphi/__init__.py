from .data import DataError, Graph, Sample, graph_from_payload, load_dataset, valid_pair
from .loss import PairingError, contrastive_loss, ranking_accuracy
from .model import (
    ModelConfig,
    SolutionScorer,
    load_checkpoint,
    save_checkpoint,
    temporal_encoding,
)
from .server import PhiServer, serve
from .train import TrainingError, train

__version__ = "0.1.0"
