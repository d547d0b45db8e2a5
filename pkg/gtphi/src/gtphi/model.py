"""Graph-transformer scorer for multi-agent roadmap solutions.

Per-vertex embeddings come from a small message-passing network with
feature-wise max aggregation over outgoing edges; each agent's path becomes a
token sequence (vertex embedding + sinusoidal time encoding, concatenated
with the agent's max-pooled identifier); all tokens plus a trainable global
token go through a transformer encoder and a linear head reads the score off
the global token.
"""

from __future__ import annotations

import math
import pickle
import zipfile
from dataclasses import asdict, dataclass
from typing import List, Sequence

import torch
from torch import Tensor, nn

from .data import Graph


@dataclass(frozen=True)
class ModelConfig:
    token_width: int = 64  # D; must be even for the sin/cos pairing
    mpnn_rounds: int = 3
    encoder_layers: int = 2
    attention_heads: int = 4
    margin: float = 0.1
    learning_rate: float = 1e-3
    batch_instances: int = 4
    epochs: int = 100
    holdout_frac: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.token_width % 2 != 0:
            raise ValueError("token_width must be even")
        if self.margin <= 0:
            raise ValueError("margin must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def temporal_encoding(t: int, d: int) -> Tensor:
    """Sinusoidal time-step encoding: dim 2k = sin(t / 10000^(2k/d)),
    dim 2k+1 = cos of the same argument."""
    if t < 0:
        raise ValueError("time step must be non-negative")
    if d % 2 != 0:
        raise ValueError("encoding width must be even")
    k = torch.arange(d // 2, dtype=torch.float32)
    arg = t / torch.pow(torch.tensor(10000.0), 2.0 * k / d)
    out = torch.empty(d)
    out[0::2] = torch.sin(arg)
    out[1::2] = torch.cos(arg)
    return out


def _te_table(length: int, d: int) -> Tensor:
    return torch.stack([temporal_encoding(t, d) for t in range(length)])


def _mlp(d_in: int, d_out: int) -> nn.Sequential:
    return nn.Sequential(nn.Linear(d_in, d_out), nn.ReLU(), nn.Linear(d_out, d_out))


class SolutionScorer(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        d = config.token_width
        self.f_x = nn.Linear(2, d)
        self.f_y = nn.Linear(2, d)
        self.f_k = nn.ModuleList(_mlp(3 * d, d) for _ in range(config.mpnn_rounds))
        self.token_proj = nn.Linear(2 * d, d)
        self.global_token = nn.Parameter(torch.zeros(d))
        layer = nn.TransformerEncoderLayer(
            d_model=d,
            nhead=config.attention_heads,
            dim_feedforward=4 * d,
            dropout=0.0,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=config.encoder_layers)
        self.f_phi = nn.Linear(d, 1)

    def edge_features(self, graph: Graph) -> Tensor:
        """One feature vector per edge, from the relative position of the
        destination with respect to the source (translation invariant)."""
        pos = torch.tensor(graph.positions, dtype=torch.float32)
        src = torch.tensor([e[0] for e in graph.edges])
        dst = torch.tensor([e[1] for e in graph.edges])
        return self.f_y(pos[dst] - pos[src])

    def tokenize_graph(self, graph: Graph) -> Tensor:
        """Per-vertex embeddings after the message-passing rounds."""
        if not graph.positions:
            raise ValueError("graph has no vertices")
        pos = torch.tensor(graph.positions, dtype=torch.float32)
        x = self.f_x(pos)
        if not graph.edges:
            return x
        src = torch.tensor([e[0] for e in graph.edges])
        dst = torch.tensor([e[1] for e in graph.edges])
        y = self.f_y(pos[dst] - pos[src])
        index = src.view(-1, 1).expand(-1, x.shape[1])
        for f_k in self.f_k:
            msg = f_k(torch.cat([x[src], x[dst], y], dim=-1))
            # feature-wise max over each vertex's outgoing edges; vertices
            # with none keep the zero initial value of the output buffer
            agg = torch.zeros_like(x).scatter_reduce(
                0, index, msg, reduce="amax", include_self=False
            )
            x = x + agg
        return x

    def forward(self, graph: Graph, solution: Sequence[Sequence[int]]) -> Tensor:
        if not solution:
            raise ValueError("solution has no agents")
        d = self.config.token_width
        x = self.tokenize_graph(graph)
        n = x.shape[0]
        tokens: List[Tensor] = []
        for path in solution:
            if not path:
                raise ValueError("empty agent path")
            if any(v < 0 or v >= n for v in path):
                raise ValueError("solution references unknown vertex")
            rho = x[torch.tensor(list(path))] + _te_table(len(path), d)
            tau = rho.max(dim=0).values
            tokens.append(torch.cat([rho, tau.unsqueeze(0).expand_as(rho)], dim=-1))
        seq = torch.cat(
            [self.global_token.view(1, -1)] + [self.token_proj(t) for t in tokens], dim=0
        )
        out = self.encoder(seq.unsqueeze(0))
        return self.f_phi(out[0, 0]).squeeze(-1)

    def score(self, graph: Graph, solution: Sequence[Sequence[int]]) -> float:
        """Deterministic inference-mode evaluation."""
        was_training = self.training
        self.eval()
        try:
            with torch.no_grad():
                value = float(self.forward(graph, solution))
        finally:
            if was_training:
                self.train()
        if math.isnan(value) or math.isinf(value):
            raise ValueError("model produced a non-finite score")
        return value


CHECKPOINT_FORMAT = "gtphi-checkpoint v1"


def save_checkpoint(path: str, model: SolutionScorer, metrics: dict) -> None:
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "config": model.config.to_dict(),
            "state_dict": model.state_dict(),
            "metrics": metrics,
        },
        path,
    )


def load_checkpoint(path: str) -> SolutionScorer:
    try:
        blob = torch.load(path, map_location="cpu", weights_only=True)
    except (RuntimeError, EOFError, pickle.UnpicklingError, zipfile.BadZipFile) as exc:
        raise ValueError(f"{path}: not a readable checkpoint ({exc})")
    if not isinstance(blob, dict) or blob.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: not a {CHECKPOINT_FORMAT} checkpoint")
    model = SolutionScorer(ModelConfig(**blob["config"]))
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model
