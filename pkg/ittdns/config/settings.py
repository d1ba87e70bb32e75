"""
⚙️ Settings
Process-level settings for logging, numerics, outputs and monitoring
"""
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load .env file at module level
try:
    from dotenv import load_dotenv
    env_path = Path(__file__).parent.parent.parent / ".env"
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    print("⚠️ python-dotenv not installed, skipping .env file loading")


class LoggingSettings(BaseSettings):
    """Logging settings"""
    model_config = SettingsConfigDict(env_prefix='ITT_LOG_')

    level: str = Field(default="INFO", description="Log level")
    file_path: Optional[str] = Field(default="./logs/ittdns.log", description="Log file path (empty disables)")
    max_file_size: str = Field(default="10 MB", description="Rotation size of the log file")
    backup_count: int = Field(default=5, description="Number of rotated files kept")
    format: str = Field(
        default="{time:YYYY-MM-DD HH:mm:ss.SSS} | {level} | {name} | {message}",
        description="Log format"
    )

    @field_validator('level')
    @classmethod
    def validate_level(cls, v):
        valid = {'TRACE', 'DEBUG', 'INFO', 'SUCCESS', 'WARNING', 'ERROR', 'CRITICAL'}
        if v.upper() not in valid:
            raise ValueError(f'Invalid log level: {v}. Valid: {sorted(valid)}')
        return v.upper()


class NumericsSettings(BaseSettings):
    """Defaults of the spectral solver"""
    model_config = SettingsConfigDict(env_prefix='ITT_NUMERICS_')

    fft_workers: Optional[int] = Field(default=None, description="Threads handed to scipy.fft")
    dealias_fraction: float = Field(default=0.5, description="Retained fraction of N/2 per axis")
    blowup_factor: float = Field(default=1e6, description="Guard multiple of the amplitude scale")
    phi_series_threshold: float = Field(default=1e-4, description="|z| below which φ-functions use series")
    desk_resolution_2d: int = Field(default=128, description="Default N for d=2 registry runs")
    desk_resolution_3d: int = Field(default=48, description="Default N for d=3 registry runs")

    @field_validator('dealias_fraction')
    @classmethod
    def validate_fraction(cls, v):
        if not 0 < v <= 1:
            raise ValueError('dealias_fraction must lie in (0, 1]')
        return v

    def desk_resolution(self, d: int) -> int:
        return self.desk_resolution_2d if d == 2 else self.desk_resolution_3d


class OutputSettings(BaseSettings):
    """Run output settings"""
    model_config = SettingsConfigDict(env_prefix='ITT_OUTPUT_')

    root: str = Field(default="./runs", description="Directory that receives run directories")
    checkpoint_pattern: str = Field(default="checkpoint_{step:08d}.itts", description="Periodic checkpoint name")
    render_figures: bool = Field(default=True, description="Write SVG renderings in report")


class MonitoringSettings(BaseSettings):
    """Error reporting settings"""
    model_config = SettingsConfigDict(env_prefix='ITT_SENTRY_')

    dsn: Optional[str] = Field(default=None, description="Sentry DSN; unset disables reporting")
    environment: Optional[str] = Field(default=None, description="Sentry environment override")
    traces_sample_rate: float = Field(default=0.0, description="Sentry performance sampling")


class Settings(BaseSettings):
    """Top-level settings"""
    model_config = SettingsConfigDict(
        env_prefix='ITT_',
        env_file='.env',
        env_file_encoding='utf-8',
        case_sensitive=False,
        extra='ignore'
    )

    # Environment
    environment: str = Field(default="development", description="Environment")
    debug: bool = Field(default=False, description="Debug mode")

    # Sub-settings
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    numerics: NumericsSettings = Field(default_factory=NumericsSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    monitoring: MonitoringSettings = Field(default_factory=MonitoringSettings)

    @field_validator('environment')
    @classmethod
    def validate_environment(cls, v):
        valid_envs = {'development', 'staging', 'production'}
        if v not in valid_envs:
            raise ValueError(f'Environment must be one of {valid_envs}')
        return v

    @property
    def is_development(self) -> bool:
        return self.environment == 'development'

    @property
    def is_production(self) -> bool:
        return self.environment == 'production'


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get settings instance"""
    return settings
