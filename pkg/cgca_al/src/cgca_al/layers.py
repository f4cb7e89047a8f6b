"""Model building blocks: graph attention, the long-range convolution,
and multi-head cross attention."""

from __future__ import annotations

import math

import torch
from torch import nn


class GraphAttention(nn.Module):
    """Multi-head graph attention over a fixed dense adjacency.

    Per head: omega_ij = LeakyReLU(z^T [W h_i || W h_j]) for neighbors j,
    alpha_ij = softmax_j(omega_ij), h'_i = sigma(sum_j alpha_ij W h_j)
    with sigma the sigmoid.  Head outputs are concatenated along the
    feature dimension.
    """

    def __init__(self, in_dim: int, out_dim: int, heads: int,
                 negative_slope: float = 0.2):
        super().__init__()
        if out_dim % heads != 0:
            raise ValueError(f"out_dim {out_dim} not divisible by {heads} heads")
        self.heads = heads
        self.head_dim = out_dim // heads
        self.W = nn.Linear(in_dim, out_dim, bias=False)
        # z^T [u || v] splits into z_src . u + z_dst . v
        self.z_src = nn.Parameter(torch.empty(heads, self.head_dim))
        self.z_dst = nn.Parameter(torch.empty(heads, self.head_dim))
        nn.init.xavier_uniform_(self.z_src)
        nn.init.xavier_uniform_(self.z_dst)
        self.act = nn.LeakyReLU(negative_slope)

    def attention(self, h: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        """Normalized coefficients alpha of shape (B, heads, N, N)."""
        B, N, _ = h.shape
        Wh = self.W(h).view(B, N, self.heads, self.head_dim).transpose(1, 2)
        e_src = (Wh * self.z_src[None, :, None, :]).sum(-1)   # (B, heads, N)
        e_dst = (Wh * self.z_dst[None, :, None, :]).sum(-1)
        omega = self.act(e_src.unsqueeze(-1) + e_dst.unsqueeze(-2))
        omega = omega.masked_fill(adj[None, None] == 0, float("-inf"))
        return torch.softmax(omega, dim=-1)

    def forward(self, h: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        B, N, _ = h.shape
        Wh = self.W(h).view(B, N, self.heads, self.head_dim).transpose(1, 2)
        alpha = self.attention(h, adj)
        out = alpha @ Wh                                      # (B, heads, N, d)
        out = out.transpose(1, 2).reshape(B, N, self.heads * self.head_dim)
        return torch.sigmoid(out)


class LongRangeConv(nn.Module):
    """One-dimensional convolution along the node axis (buses ordered by
    id), kernel 3 with same-padding; complements the attention's one-hop
    receptive field."""

    def __init__(self, in_dim: int, out_dim: int, kernel_size: int = 3):
        super().__init__()
        self.conv = nn.Conv1d(in_dim, out_dim, kernel_size,
                              padding=kernel_size // 2)

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        return self.conv(h.transpose(1, 2)).transpose(1, 2)


class GatCnnLayer(nn.Module):
    """Graph attention and convolution in parallel, summed, plus a
    residual connection (projected when the width changes)."""

    def __init__(self, in_dim: int, out_dim: int, heads: int):
        super().__init__()
        self.gat = GraphAttention(in_dim, out_dim, heads)
        self.conv = LongRangeConv(in_dim, out_dim)
        self.proj = (nn.Identity() if in_dim == out_dim
                     else nn.Linear(in_dim, out_dim, bias=False))

    def forward(self, h: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        return self.gat(h, adj) + self.conv(h) + self.proj(h)


class MultiHeadCrossAttention(nn.Module):
    """Scaled dot-product cross attention: queries from the attacked-area
    buses, keys/values from every bus; heads concatenated, then W_o."""

    def __init__(self, dim: int, heads: int):
        super().__init__()
        if dim % heads != 0:
            raise ValueError(f"dim {dim} not divisible by {heads} heads")
        self.heads = heads
        self.head_dim = dim // heads
        self.W_q = nn.Linear(dim, dim, bias=False)
        self.W_k = nn.Linear(dim, dim, bias=False)
        self.W_v = nn.Linear(dim, dim, bias=False)
        self.W_o = nn.Linear(dim, dim, bias=False)

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        B, N, _ = x.shape
        return x.view(B, N, self.heads, self.head_dim).transpose(1, 2)

    def attention(self, f_q: torch.Tensor, f_kv: torch.Tensor) -> torch.Tensor:
        """Attention weights of shape (B, heads, N_q, N_kv)."""
        Q = self._split(self.W_q(f_q))
        K = self._split(self.W_k(f_kv))
        return torch.softmax(Q @ K.transpose(-1, -2) / math.sqrt(self.head_dim),
                             dim=-1)

    def forward(self, f_q: torch.Tensor, f_kv: torch.Tensor) -> torch.Tensor:
        B, Nq, _ = f_q.shape
        V = self._split(self.W_v(f_kv))
        att = self.attention(f_q, f_kv)
        out = (att @ V).transpose(1, 2).reshape(B, Nq,
                                                self.heads * self.head_dim)
        return self.W_o(out)
