from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    n_max: int = 12
    matrix_budget: int = 4096
    enumeration_budget: int = 10_000_000
    group_dp_max: int = 7
    transfer_n_max: int = 6
    jm_n_max: int = 7
    nc_n_max: int = 14
    word_length_max: int = 16
    word_cumulant_max: int = 12
    chi_radius: float = 0.1
    chi_n_cut: int = 60
    cancellation_ratio: float = 1e6
    threads: int = 4
    chunk_size: int = 1024
    unitarity_tol: float = 1e-12
    log_level: str = "WARNING"

    model_config = SettingsConfigDict(env_prefix="HEATWALK_", env_file=".env")


settings = Settings()
