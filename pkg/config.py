"""Configuration management for the surge forecasting and relocation toolkit."""
import os
from dotenv import load_dotenv

load_dotenv()

__version__ = '1.0.0'


class Config:
    """Application configuration."""

    # Logging
    LOG_LEVEL = os.getenv('SURGEFLOW_LOG_LEVEL', 'INFO')

    # Reproducibility
    SEED = int(os.getenv('SURGEFLOW_SEED', '42'))

    # Forecast model settings
    HIDDEN_SIZE = 50
    WINDOW = 24  # hours of history per input window
    HORIZON = 24  # hours predicted per window
    EPOCHS = int(os.getenv('SURGEFLOW_EPOCHS', '100'))
    LEARNING_RATE = float(os.getenv('SURGEFLOW_LEARNING_RATE', '0.001'))
    BATCH_SIZE = int(os.getenv('SURGEFLOW_BATCH_SIZE', '16'))
    GRAD_CLIP_NORM = float(os.getenv('SURGEFLOW_GRAD_CLIP', '1.0'))
    TRAIN_FRACTION = float(os.getenv('SURGEFLOW_TRAIN_FRACTION', '0.8'))
    ADAM_BETA1 = 0.9
    ADAM_BETA2 = 0.999
    ADAM_EPSILON = 1e-8
    MODEL_FORMAT = 'surgeflow-lstm/1'

    # Front-line queue and simulation settings
    W_MAX_HOURS = float(os.getenv('SURGEFLOW_W_MAX_HOURS', '0.5'))
    SERVICE_MEAN_MIN = 10.0
    SERVICE_SD_MIN = 3.0
    DISCHARGE_RATE = float(os.getenv('SURGEFLOW_DISCHARGE_RATE', '0.10'))
    SIM_HORIZON_HOURS = 24
    # Low / Medium / High, taken from the relocated-acuity split 252/173/107
    ACUITY_MIX = (0.474, 0.325, 0.201)

    # Reference hospital network: (id, beds, transfer cost)
    REFERENCE_HOSPITALS = (
        ('H1', 60, 0.0),
        ('H2', 40, 10.0),
        ('H3', 30, 15.0),
        ('H4', 30, 20.0),
        ('H5', 30, 25.0),
    )
    FRONT_LINE_ID = 'H1'

    # Synthetic arrival series
    SYNTH_DAYS = 31
    SYNTH_BASE_LOW = 50.0
    SYNTH_BASE_HIGH = 60.0
    SYNTH_TROUGH_HOURS = (3, 4, 5)
    SYNTH_PEAK_HOURS = (10, 16, 17)
    SYNTH_WEEKEND_SCALE = 0.9
    SYNTH_NOISE_SD = 1.5
    SYNTH_START_WEEKDAY = 4  # 2021-01-01 was a Friday (Monday = 0)
