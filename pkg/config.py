"""
Configuration management for the Hadamard means toolkit

Loads environment variables and provides configuration classes for different environments.
"""
import os
from dotenv import load_dotenv

from services.errors import DomainError

# Load environment variables from .env file
load_dotenv()


class EnvSetting:
    """
    Numeric setting read from the environment on every access.

    A malformed value raises DomainError naming the variable instead of
    failing when this module is imported.
    """

    def __init__(self, name: str, default, cast):
        self.name = name
        self.default = default
        self.cast = cast

    def __get__(self, obj, owner):
        raw = os.getenv(self.name)
        if raw is None or raw.strip() == '':
            return self.default
        try:
            return self.cast(raw)
        except ValueError:
            raise DomainError(
                f"{self.name} must be {'an integer' if self.cast is int else 'a number'}, got {raw!r}",
                field=self.name
            )


def _env_float(name: str, default: float) -> EnvSetting:
    return EnvSetting(name, default, float)


def _env_int(name: str, default: int) -> EnvSetting:
    return EnvSetting(name, default, int)


class Config:
    """Base configuration with common settings."""

    # Output and logging
    OUTPUT_DIR = os.getenv('HADAMARD_OUTPUT_DIR', './output')
    LOG_LEVEL = os.getenv('HADAMARD_LOG_LEVEL', 'INFO').upper()

    # Base seed override; None means "use the value from the file or flag"
    BASE_SEED = os.getenv('HADAMARD_SEED')

    # Numerical tolerances (none of them are fixed by the theory)
    TOL_POINT = _env_float('HADAMARD_TOL_POINT', 1e-10)
    EPS_PD = _env_float('HADAMARD_EPS_PD', 1e-12)
    TOL_COMMUTE = _env_float('HADAMARD_TOL_COMMUTE', 1e-8)

    # Es-Sahib–Heinich construction
    ES_SAHIB_N_CAP = _env_int('HADAMARD_ES_SAHIB_N_CAP', 8)
    ES_SAHIB_TOL = _env_float('HADAMARD_ES_SAHIB_TOL', 1e-9)
    ES_SAHIB_MAX_ROUNDS = _env_int('HADAMARD_ES_SAHIB_MAX_ROUNDS', 200)

    # Experiment defaults
    DEFAULT_N_MAX = _env_int('HADAMARD_N_MAX', 5000)
    DEFAULT_REPLICATIONS = _env_int('HADAMARD_REPLICATIONS', 20)
    DEFAULT_TRACE_STRIDE = _env_int('HADAMARD_TRACE_STRIDE', 50)
    LP_MAX_STEPS = _env_int('HADAMARD_LP_MAX_STEPS', 2_000_000)

    @classmethod
    def validate(cls):
        """Validate that the configured values are usable."""
        problems = []

        def read(attr):
            try:
                return getattr(cls, attr)
            except DomainError as e:
                problems.append(e.field)
                return None

        for attr in ('TOL_POINT', 'EPS_PD', 'TOL_COMMUTE', 'ES_SAHIB_TOL'):
            value = read(attr)
            if value is not None and not value > 0:
                problems.append(attr)

        for attr in ('ES_SAHIB_N_CAP', 'ES_SAHIB_MAX_ROUNDS', 'DEFAULT_N_MAX',
                     'DEFAULT_REPLICATIONS', 'DEFAULT_TRACE_STRIDE', 'LP_MAX_STEPS'):
            value = read(attr)
            if value is not None and value < 1:
                problems.append(attr)

        if cls.BASE_SEED is not None:
            try:
                if int(cls.BASE_SEED) < 0:
                    problems.append('HADAMARD_SEED')
            except ValueError:
                problems.append('HADAMARD_SEED')

        if problems:
            raise DomainError(
                f"Invalid configuration values: {', '.join(problems)}. "
                f"Please check your .env file.",
                field=problems[0]
            )

    @classmethod
    def base_seed_override(cls):
        """Return the HADAMARD_SEED override as an int, or None when unset."""
        raw = os.getenv('HADAMARD_SEED', cls.BASE_SEED)
        if raw is None or raw == '':
            return None
        try:
            seed = int(raw)
        except ValueError:
            raise DomainError(f"HADAMARD_SEED must be an integer, got {raw!r}", field='HADAMARD_SEED')
        if seed < 0:
            raise DomainError(f"HADAMARD_SEED must be nonnegative, got {seed}", field='HADAMARD_SEED')
        return seed


class DevelopmentConfig(Config):
    """Desk-scale runs reproducing the simulation studies."""
    DEBUG = False
    TESTING = False


class TestingConfig(Config):
    """Small sizes for the test-suite and quick smoke runs."""
    DEBUG = True
    TESTING = True

    LOG_LEVEL = os.getenv('HADAMARD_LOG_LEVEL', 'DEBUG').upper()
    DEFAULT_N_MAX = _env_int('HADAMARD_TEST_N_MAX', 500)
    DEFAULT_REPLICATIONS = _env_int('HADAMARD_TEST_REPLICATIONS', 3)
    DEFAULT_TRACE_STRIDE = 10
    LP_MAX_STEPS = 200_000


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(env=None):
    """
    Get configuration for the specified environment.

    Args:
        env (str): Environment name ('development', 'testing')
                   If None, uses HADAMARD_ENV environment variable or 'development'

    Returns:
        Config subclass
    """
    if env is None:
        env = os.getenv('HADAMARD_ENV', 'development')

    return config.get(env, config['default'])
