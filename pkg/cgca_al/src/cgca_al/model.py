"""The attack-localization network.

Three GAT-CNN layers build bus representations, multi-head cross
attention lets the attacked-area buses query the whole grid, endpoint
features are concatenated per attacked-area line, and a dense head emits
one attack probability per line.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn

from .data import N_FEATURES, GraphSpec
from .layers import GatCnnLayer, MultiHeadCrossAttention


@dataclass(frozen=True)
class ModelConfig:
    channels: tuple[int, ...] = (256, 256, 256)
    heads: tuple[int, ...] = (4, 4, 4)
    mhca_heads: int = 4
    dense: tuple[int, ...] = (256, 128, 128)
    n_features: int = N_FEATURES

    def __post_init__(self):
        if len(self.channels) != len(self.heads):
            raise ValueError("channels and heads must have equal length")


class CgcaAl(nn.Module):
    def __init__(self, spec: GraphSpec, config: ModelConfig = ModelConfig()):
        super().__init__()
        self.config = config
        self.register_buffer("adj", spec.adjacency())
        self.register_buffer("h_idx", spec.h_indices())
        self.register_buffer("edge_idx", spec.edge_endpoint_indices())
        self.register_buffer("feat_mean", torch.zeros(config.n_features))
        self.register_buffer("feat_std", torch.ones(config.n_features))

        layers = []
        in_dim = config.n_features
        for out_dim, heads in zip(config.channels, config.heads):
            layers.append(GatCnnLayer(in_dim, out_dim, heads))
            in_dim = out_dim
        self.layers = nn.ModuleList(layers)
        self.mhca = MultiHeadCrossAttention(in_dim, config.mhca_heads)

        head = []
        d = 2 * in_dim                       # concatenated line endpoints
        for width in config.dense:
            head.extend([nn.Linear(d, width), nn.ReLU()])
            d = width
        head.append(nn.Linear(d, 1))
        self.head = nn.Sequential(*head)

    def set_normalization(self, mean: torch.Tensor, std: torch.Tensor) -> None:
        self.feat_mean.copy_(mean)
        self.feat_std.copy_(std)

    def bus_representations(self, features: torch.Tensor) -> torch.Tensor:
        h = (features - self.feat_mean) / self.feat_std
        for layer in self.layers:
            h = layer(h, self.adj)
        f_q = h[:, self.h_idx]
        enhanced = f_q + self.mhca(f_q, h)
        out = h.clone()
        out[:, self.h_idx] = enhanced
        return out

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        """(B, N, F) bus features -> (B, |E_H|) attack probabilities."""
        h = self.bus_representations(features)
        u = h[:, self.edge_idx[:, 0]]
        v = h[:, self.edge_idx[:, 1]]
        logits = self.head(torch.cat([u, v], dim=-1)).squeeze(-1)
        return torch.sigmoid(logits)


def save_checkpoint(path, model: CgcaAl, spec: GraphSpec,
                    extra: dict | None = None) -> None:
    torch.save({
        "state_dict": model.state_dict(),
        "config": asdict(model.config),
        "spec": {
            "bus_ids": list(spec.bus_ids),
            "edges": [list(e) for e in spec.edges],
            "bus_ids_H": list(spec.bus_ids_H),
            "line_ids_H": list(spec.line_ids_H),
        },
        "extra": extra or {},
    }, path)


def load_checkpoint(path) -> tuple[CgcaAl, GraphSpec, dict]:
    doc = torch.load(path, weights_only=True)
    spec = GraphSpec(
        bus_ids=tuple(doc["spec"]["bus_ids"]),
        edges=tuple(tuple(e) for e in doc["spec"]["edges"]),
        bus_ids_H=tuple(doc["spec"]["bus_ids_H"]),
        line_ids_H=tuple(doc["spec"]["line_ids_H"]),
    )
    cfg = doc["config"]
    config = ModelConfig(channels=tuple(cfg["channels"]),
                         heads=tuple(cfg["heads"]),
                         mhca_heads=cfg["mhca_heads"],
                         dense=tuple(cfg["dense"]),
                         n_features=cfg["n_features"])
    model = CgcaAl(spec, config)
    model.load_state_dict(doc["state_dict"])
    model.eval()
    return model, spec, doc["extra"]
