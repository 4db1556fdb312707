import os

import yaml


def _config_path():
    override = os.environ.get("EMB_ENGINE_CONFIG")
    if override:
        return override
    return os.path.join(os.path.dirname(__file__), "..", "config.yaml")


def load_config(path=None):
    """
    Load the YAML configuration.

    Raises FileNotFoundError with the resolved path when the file is missing.
    """
    path = path or _config_path()
    try:
        with open(path, "r") as f:
            return yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise FileNotFoundError(f"Config file not found: {path}")


config = load_config()


def default_depth():
    return int(config["verify"]["default_depth"])


def max_depth():
    return int(config["verify"]["max_depth"])


def settle_index():
    return int(config["verify"]["settle_index"])


def tested_depths():
    return [int(d) for d in config["verify"]["depths"]]


def witness_bound():
    return int(config["rank"]["witness_bound"])


def oracle_class_limit():
    return int(config["rank"]["oracle_class_limit"])


def max_assignments():
    return int(config["search"]["max_assignments"])


def codomain_symbol(name):
    return config["codomain_symbols"][name]


def json_indent():
    return int(config["cli"]["indent"])


def output_dir():
    return config["cli"]["output_dir"]


def encoding_check_bound():
    return int(config["reduction"]["encoding_check_bound"])


def batch_workers():
    return int(config["reduction"]["batch_workers"])


def log_level():
    return config["logging"]["level"]


def log_format():
    return config["logging"]["format"]
