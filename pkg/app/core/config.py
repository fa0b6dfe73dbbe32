"""
Application configuration using Pydantic Settings.

This module loads configuration from environment variables and provides
centralized settings for the engine and the command-line surface.
"""

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.core.enums import ViolationPolicy


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix='PROJCOV_',
        env_file='.env',
        env_file_encoding='utf-8',
        case_sensitive=False,
        extra='ignore',
    )

    # Application
    APP_NAME: str = 'Projection Coverage Engine'
    APP_VERSION: str = '1.0.0'
    DEBUG: bool = False
    LOG_LEVEL: str = 'WARNING'

    # Exact computation limits
    # Full-coverage denominators are #P-hard, so enumeration is opt-in above this size
    ENUMERATION_LIMIT: int = 10_000_000
    ORACLE_LIMIT: int = 100_000
    # Open cells in one next-point program above which a slow solve is announced
    LARGE_PROGRAM_CELLS: int = 250

    # Coverage and generation defaults
    DEFAULT_K: int = 2
    DEFAULT_BUDGET: int = 1000
    VIOLATION_POLICY: ViolationPolicy = ViolationPolicy.REJECT

    # Reports
    REPORT_DECIMALS: int = 6

    # Validators
    @field_validator('LOG_LEVEL')
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate LOG_LEVEL is a standard logging level name."""
        allowed_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        level = v.upper()
        if level not in allowed_levels:
            raise ValueError(f'LOG_LEVEL must be one of {allowed_levels}. Got: {v}')
        return level

    @field_validator('ENUMERATION_LIMIT', 'ORACLE_LIMIT', 'LARGE_PROGRAM_CELLS', 'DEFAULT_K')
    @classmethod
    def validate_positive(cls, v: int) -> int:
        """Limits and k must be positive."""
        if v < 1:
            raise ValueError('value must be at least 1')
        return v

    @field_validator('DEFAULT_BUDGET', 'REPORT_DECIMALS')
    @classmethod
    def validate_non_negative(cls, v: int) -> int:
        """Budgets and decimal places cannot be negative."""
        if v < 0:
            raise ValueError('value cannot be negative')
        return v


# Create settings instance
settings = Settings()
