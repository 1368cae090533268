"""Minimal explicit-state Adam for torch tensors.

Keeping the moment buffers in plain sight makes snapshot/rollback trivial,
which the energy-guarded refinement loops rely on.
"""
from __future__ import annotations

import torch


class Adam:
    def __init__(self, params, lr=1e-3, betas=(0.9, 0.999), eps=1e-8):
        self.params = list(params)
        self.lr = float(lr)
        self.b1, self.b2 = betas
        self.eps = eps
        self.t = 0
        self.m = [torch.zeros_like(p) for p in self.params]
        self.v = [torch.zeros_like(p) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            if p.grad is not None:
                p.grad.detach_()
                p.grad.zero_()

    @torch.no_grad()
    def compute_directions(self) -> list[torch.Tensor]:
        """Fold current gradients into the moments, return update directions.

        A parameter's update for step length a is `p -= a * direction`. With
        freshly reset moments the direction has positive inner product with
        the gradient, so a short enough step always descends.
        """
        self.t += 1
        dirs = []
        for i, p in enumerate(self.params):
            g = p.grad if p.grad is not None else torch.zeros_like(p)
            self.m[i] = self.b1 * self.m[i] + (1 - self.b1) * g
            self.v[i] = self.b2 * self.v[i] + (1 - self.b2) * g * g
            m_hat = self.m[i] / (1 - self.b1**self.t)
            v_hat = self.v[i] / (1 - self.b2**self.t)
            dirs.append(m_hat / (torch.sqrt(v_hat) + self.eps))
        return dirs

    @torch.no_grad()
    def step(self):
        for p, d in zip(self.params, self.compute_directions()):
            p -= self.lr * d

    def snapshot(self):
        return (
            self.t,
            self.lr,
            [p.detach().clone() for p in self.params],
            [m.clone() for m in self.m],
            [v.clone() for v in self.v],
        )

    @torch.no_grad()
    def restore(self, snap):
        self.t, self.lr, params, m, v = snap
        for p, saved in zip(self.params, params):
            p.copy_(saved)
        self.m = [x.clone() for x in m]
        self.v = [x.clone() for x in v]

    def reset_moments(self):
        """Forget momentum; the next step follows the raw gradient sign."""
        self.t = 0
        self.m = [torch.zeros_like(p) for p in self.params]
        self.v = [torch.zeros_like(p) for p in self.params]
