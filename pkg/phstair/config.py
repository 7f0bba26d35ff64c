from __future__ import absolute_import
import collections
import json
import logging
import os
from io import open
from phstair.errors import PreconditionError
from phstair.model import DEFAULT_TOLERANCES, Tolerances, parse_p


CONFIG_ENV_VAR = "PHSTAIR_CONFIG"

DEFAULT_P = "1/2"
DEFAULT_SEED = 42
DEFAULT_PATHS = 200000
DEFAULT_MARTINGALE_PATHS = 500000

KNOWN_KEYS = set(["p", "mode", "seed", "paths", "martingale_paths", "tolerances"])

logger = logging.getLogger(__name__)


class Config(collections.namedtuple("Config", ["params", "tolerances", "seed", "paths", "martingale_paths"])):
    __slots__ = ()

    def replace(self, **kwargs):
        return self._replace(**kwargs)

    def to_dict(self):
        data = self.params.to_dict()
        data["seed"] = self.seed
        data["paths"] = self.paths
        data["martingale_paths"] = self.martingale_paths
        data["tolerances"] = self.tolerances.to_dict()
        return data


def default_config():
    return Config(params=parse_p(DEFAULT_P),
                  tolerances=DEFAULT_TOLERANCES,
                  seed=DEFAULT_SEED,
                  paths=DEFAULT_PATHS,
                  martingale_paths=DEFAULT_MARTINGALE_PATHS)


def config_from_dict(data):
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise PreconditionError("Unknown config keys: %s." % ", ".join(sorted(unknown)))
    config = default_config()
    mode = data.get("mode")
    if "p" in data:
        params = parse_p(data["p"], mode)
    elif mode is not None:
        params = parse_p(DEFAULT_P, mode)
    else:
        params = config.params
    tolerances = Tolerances(**data.get("tolerances", {}))
    return Config(params=params,
                  tolerances=tolerances,
                  seed=int(data.get("seed", config.seed)),
                  paths=int(data.get("paths", config.paths)),
                  martingale_paths=int(data.get("martingale_paths", config.martingale_paths)))


def resolve_config_path(path=None):
    if path:
        return path
    return os.environ.get(CONFIG_ENV_VAR) or None


def load_config(path=None):
    # Load the JSON config at path, or the file named by $PHSTAIR_CONFIG when
    # path is omitted. Falls back to built-in defaults when neither is given.
    path = resolve_config_path(path)
    if path is None:
        return default_config()
    logger.debug("Reading config from %s", path)
    with open(path, "r", encoding="utf-8") as fd:
        data = json.load(fd)
    if not isinstance(data, dict):
        raise PreconditionError("Config file %s must hold a JSON object." % path)
    return config_from_dict(data)


def dump_config(config, fd):
    json.dump(config.to_dict(), fd, indent=2, sort_keys=True)
