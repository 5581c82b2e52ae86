from .energy import evaluate, relative_energy, to_normal_form, unary_strength
from .instance_io import read_energy, write_energy
from .model import UNLABELED, BinaryEnergy, DiscreteEnergy, GraphTopology
from .moves import build_expansion, build_fusion, fuse
from .qpbo import qpbo_solve
from .solver import SolverFactory
from .solvers import (SolverConfig, SolverTrace, alpha_expansion,
                      brute_force_min, ga_fusion, qpbo_only, random_fusion,
                      st_fusion)
