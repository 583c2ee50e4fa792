"""Benchmark scenarios: initial conditions and per-step kernel mix.

``rotating-star-proxy`` exercises the coupled workload (6 gravity + 3 hydro
solver iterations per timestep); ``blast`` is the hydro-only workload
(3 hydro iterations, no gravity kernels).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import GravityConfig, HydroConfig
from .octree import Octree, build_unigrid

__all__ = ["ScenarioConfig", "init_scenario", "SCENARIO_NAMES"]

SCENARIO_NAMES = ("rotating-star-proxy", "blast")

BLAST_BACKGROUND_E = 1e-3
BLAST_CENTER_E = 10.0
STAR_PEAK_RHO = 10.0
STAR_SIGMA = 1.0 / 8.0   # Gaussian width as a fraction of the domain
STAR_OMEGA = 1.0         # rigid rotation rate about the z axis
STAR_K = 1.0             # barotropic constant: p = K * rho**gamma
# atmosphere floor under the Gaussian: keeps neighbor density ratios bounded
# so the minmod corner reconstruction cannot zero out the density
STAR_ATMOSPHERE = 0.05


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    max_level: int = 3
    stop_step: int = 10
    theta: float = 0.34
    expansion_order: int = 1
    disable_output: bool = False
    hydro: HydroConfig = field(default_factory=HydroConfig)

    def __post_init__(self):
        if self.name not in SCENARIO_NAMES:
            raise ValueError(
                f"unknown scenario {self.name!r}; expected one of {SCENARIO_NAMES}"
            )
        if self.stop_step < 1:
            raise ValueError(f"stop_step must be >= 1, got {self.stop_step}")
        if not 0 <= self.max_level <= 5:
            raise ValueError(f"max_level must be in [0, 5], got {self.max_level}")

    @property
    def gravity_per_step(self) -> int:
        return 6 if self.name == "rotating-star-proxy" else 0

    @property
    def hydro_per_step(self) -> int:
        return 3

    @property
    def gravity(self) -> GravityConfig:
        return GravityConfig(theta=self.theta, expansion_order=self.expansion_order)


def _blast_init(gamma: float):
    def init(X, Y, Z, dx):
        rho = np.ones_like(X)
        E = np.full_like(X, BLAST_BACKGROUND_E)
        # the 2x2x2 block of cells around the domain center
        center = (np.abs(X - 0.5) < dx) & (np.abs(Y - 0.5) < dx) & (np.abs(Z - 0.5) < dx)
        E[center] = BLAST_CENTER_E
        zero = np.zeros_like(X)
        return {
            "rho": rho,
            "sx": zero,
            "sy": zero.copy(),
            "sz": zero.copy(),
            "E": E,
            "mass": rho * dx**3,
        }

    return init


def _rotating_star_init(gamma: float):
    def init(X, Y, Z, dx):
        r2 = (X - 0.5) ** 2 + (Y - 0.5) ** 2 + (Z - 0.5) ** 2
        rho = np.maximum(
            STAR_PEAK_RHO * np.exp(-r2 / (2.0 * STAR_SIGMA**2)), STAR_ATMOSPHERE
        )
        vx = -STAR_OMEGA * (Y - 0.5)
        vy = STAR_OMEGA * (X - 0.5)
        p = STAR_K * rho**gamma
        E = p / (gamma - 1.0) + 0.5 * rho * (vx**2 + vy**2)
        return {
            "rho": rho,
            "sx": rho * vx,
            "sy": rho * vy,
            "sz": np.zeros_like(X),
            "E": E,
            "mass": rho * dx**3,
        }

    return init


def init_scenario(cfg: ScenarioConfig) -> Octree:
    """Build the unigrid tree with the scenario's initial interior state;
    ghost cells stay unfilled until the first exchange."""
    gamma = cfg.hydro.gamma
    if cfg.name == "blast":
        return build_unigrid(cfg.max_level, _blast_init(gamma))
    return build_unigrid(cfg.max_level, _rotating_star_init(gamma))
