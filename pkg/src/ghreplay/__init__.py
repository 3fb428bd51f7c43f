"""Online LSTM regression with episodic replay across greenhouse datasets.

The package trains a small recurrent model incrementally on streamed
climate windows, protects it from catastrophic forgetting with a
fixed-capacity replay memory, and measures how well the trained model
transfers between greenhouses with different dynamics.
"""

from .climate import (
    ClimateRecord,
    GreenhouseParams,
    PRESETS,
    generate_series,
    photosynthesis_rate,
    saturation_vapor_pressure,
    transpiration_rate,
    vapor_pressure_deficit,
)
from .dataset import Normalizer, WindowedSample, build_samples, default_normalizer, extract_windows
from .memory import EpisodicMemory, MemoryConfig, SubstitutionStrategy
from .model import (
    AdamState,
    ModelConfig,
    ModelParams,
    adam_step,
    backward,
    forward,
    init_adam,
    init_model,
    mse_loss,
    predict_batch,
)
from .rng import SeededRng
from .trainer import (
    EvalPoint,
    LearningCurve,
    Phase,
    ScenarioConfig,
    evaluate,
    run_baseline,
    run_scenario,
    train_update,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ClimateRecord",
    "EpisodicMemory",
    "EvalPoint",
    "GreenhouseParams",
    "LearningCurve",
    "MemoryConfig",
    "ModelConfig",
    "ModelParams",
    "Normalizer",
    "PRESETS",
    "Phase",
    "ScenarioConfig",
    "SeededRng",
    "SubstitutionStrategy",
    "WindowedSample",
    "adam_step",
    "backward",
    "build_samples",
    "default_normalizer",
    "evaluate",
    "extract_windows",
    "forward",
    "generate_series",
    "init_adam",
    "init_model",
    "mse_loss",
    "photosynthesis_rate",
    "predict_batch",
    "run_baseline",
    "run_scenario",
    "saturation_vapor_pressure",
    "train_update",
    "transpiration_rate",
    "vapor_pressure_deficit",
]
