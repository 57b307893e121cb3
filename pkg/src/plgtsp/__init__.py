"""TSP on power law graphs: models, solvers, ratio bounds and hardness gadgets."""

__version__ = "0.1.0"
