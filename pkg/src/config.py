from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings. They shape logging only, never numeric output."""

    model_config = SettingsConfigDict(
        env_prefix="PHIBP_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    environment: str = Field(default="development", description="development | production")
    log_level: str = Field(default="INFO", description="Root log level")
    log_json: bool = Field(default=False, description="Force JSON log lines on the console")
    log_file: Optional[str] = Field(default=None, description="Optional JSON log file")
    data_dir: str = Field(default="data", description="Directory with YAML rule tables")


settings = Settings()


def get_settings() -> Settings:
    return settings
