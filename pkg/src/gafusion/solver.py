from .exceptions import SpecValidationError
from .logger import logger as log


class SolverFactory:
    @classmethod
    def from_config(cls, config):
        """
        Usage example:
        >>> SolverFactory.from_config(SolverConfig(algorithm="ga", time_budget=10))

        Args:
            config (SolverConfig) : validated solver settings

        Returns:
            SolverModel
        """
        from .solvers import AlphaExpansion, GAFusion, QPBOOnly, RandomFusion, STFusion

        match config.algorithm:
            case "ga":
                solver = GAFusion(config)
            case "st":
                solver = STFusion(config)
            case "random":
                solver = RandomFusion(config)
            case "expansion":
                solver = AlphaExpansion(config, "qpbo")
            case "expansion-trunc":
                solver = AlphaExpansion(config, "truncate")
            case "qpbo":
                solver = QPBOOnly(config)
            case _:
                raise SpecValidationError(f"unknown algorithm {config.algorithm}")

        log.debug(f"Using solver {solver.name} with seed {config.seed}")
        return solver

    @classmethod
    def from_algorithm(cls, algorithm: str, **settings):
        from .solvers import SolverConfig

        return cls.from_config(SolverConfig.build(algorithm=algorithm, **settings))
