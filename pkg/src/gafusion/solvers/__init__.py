from typing import Tuple

import numpy as np

from ..model import DiscreteEnergy
from .exhaustive import brute_force_min
from .expansion import AlphaExpansion, ExpansionMode
from .fusion import FusionSolver, GAFusion, RandomFusion, STFusion
from .model import SolverConfig, SolverModel, SolverTrace, TraceRecord
from .roof_dual import QPBOOnly


def ga_fusion(energy: DiscreteEnergy, config: SolverConfig) -> Tuple[np.ndarray, SolverTrace]:
    return GAFusion(config).minimize(energy)


def alpha_expansion(
    energy: DiscreteEnergy, config: SolverConfig, mode: ExpansionMode = "qpbo"
) -> Tuple[np.ndarray, SolverTrace]:
    return AlphaExpansion(config, mode).minimize(energy)


def st_fusion(energy: DiscreteEnergy, config: SolverConfig) -> Tuple[np.ndarray, SolverTrace]:
    return STFusion(config).minimize(energy)


def random_fusion(energy: DiscreteEnergy, config: SolverConfig) -> Tuple[np.ndarray, SolverTrace]:
    return RandomFusion(config).minimize(energy)


def qpbo_only(energy: DiscreteEnergy, config: SolverConfig) -> Tuple[np.ndarray, SolverTrace]:
    return QPBOOnly(config).minimize(energy)
