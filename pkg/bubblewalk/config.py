from pathlib import Path
from pydantic_settings import BaseSettings, SettingsConfigDict

BASE_DIR = Path(__file__).resolve().parent.parent
ENV_FILE = BASE_DIR / ".env"


class Settings(BaseSettings):
    # Application
    PROJECT_NAME: str = "bubblewalk"
    VERSION: str = "0.1.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # Seeding and parallelism
    DEFAULT_SEED: int = 20240601
    THREADS: int = 0  # 0 = all cores
    REPLICA_CHUNK: int = 256

    # Resource guards
    MAX_BALL_SIZE: int = 2_000_000
    MAX_TRACKED_POINTS: int = 4_000_000
    MAX_ZLINE_STATES: int = 1_000_001
    MAX_PROBE_CLASSES: int = 500_000
    MAX_COUNT_WORD_LENGTH: int = 12
    MAX_EXACT_SWS_STEPS: int = 3

    # Inverted orbit engines
    ORBIT_ENGINE: str = "tracked"
    TRACKED_MAX_STEPS: int = 2000
    TRACKED_INITIAL_RADIUS: int = 4

    # Numerics
    REJECTION_MAX_RATE: float = 12.0
    ZLINE_ITERATION_BUDGET: int = 20_000_000
    SPECTRAL_CUTOFF: float = -700.0
    FLOW_TOLERANCE: float = 1e-12

    model_config = SettingsConfigDict(
        env_file=str(ENV_FILE),
        env_prefix="BUBBLEWALK_",
        case_sensitive=True,
        extra="ignore",
    )


settings = Settings()
