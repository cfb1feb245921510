from brwsim.runner.config import ExperimentConfig, config_from_dict, load_config, model_config
from brwsim.runner.experiment import run_experiment
from brwsim.runner.registry import registry
from brwsim.runner.seeds import derive_seeds

__all__ = ["ExperimentConfig", "config_from_dict", "derive_seeds", "load_config", "model_config", "registry", "run_experiment"]
