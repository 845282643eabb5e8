"""Runtime knobs shared by the library and the CLI.

Each field can be preset through an environment variable with the
``GRASSFREE_`` prefix (``GRASSFREE_BUDGET_VECTORS``, ``GRASSFREE_MAX_RANK``,
``GRASSFREE_WORKERS``, ``GRASSFREE_SMALL_S1_CONSTANT``).
"""

import os
from dataclasses import dataclass
from fractions import Fraction

ENV_PREFIX = "GRASSFREE_"


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Settings:
    budget_vectors: int = 10**6
    max_rank: int = 8
    workers: int = 1
    small_s1_constant: Fraction = Fraction(1)

    @classmethod
    def from_env(cls, environ=None):
        env = os.environ if environ is None else environ
        s = cls()
        if ENV_PREFIX + "BUDGET_VECTORS" in env:
            s.budget_vectors = int(env[ENV_PREFIX + "BUDGET_VECTORS"])
        if ENV_PREFIX + "MAX_RANK" in env:
            s.max_rank = int(env[ENV_PREFIX + "MAX_RANK"])
        if ENV_PREFIX + "WORKERS" in env:
            s.workers = int(env[ENV_PREFIX + "WORKERS"])
        if ENV_PREFIX + "SMALL_S1_CONSTANT" in env:
            s.small_s1_constant = Fraction(env[ENV_PREFIX + "SMALL_S1_CONSTANT"])
        return s


settings = Settings.from_env()
