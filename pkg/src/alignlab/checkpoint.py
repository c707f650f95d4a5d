"""Versioned ``.npz`` checkpoints of every learned parameter.

Layout (format version 1): one array per parameter under its
``<group>/<name>`` key (see :meth:`Trainer.parameters`), plus

* ``meta/format_version``: int64 scalar
* ``meta/episode``: int64 scalar, episodes completed
* ``meta/seed``: int64 scalar
* ``meta/config``: JSON of the trainer config (0-d unicode array)
* ``meta/rng``: JSON of the action and environment-seed generator states
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict

import numpy as np

from .errors import ShapeError, StateError
from .graph import build_laplacian

FORMAT_VERSION = 1


def save_checkpoint(trainer, path):
    arrays = {key: np.asarray(v) for key, v in trainer.parameters().items()}
    rng = {
        "actions": trainer.core.action_rng.bit_generator.state,
        "env": trainer.env_seeds.bit_generator.state,
    }
    arrays.update({
        "meta/format_version": np.int64(FORMAT_VERSION),
        "meta/episode": np.int64(trainer.episode),
        "meta/seed": np.int64(trainer.seed),
        "meta/config": np.array(json.dumps(asdict(trainer.config), sort_keys=True)),
        "meta/rng": np.array(json.dumps(rng, sort_keys=True)),
    })
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)
    return path


def read_checkpoint(path):
    with np.load(path, allow_pickle=False) as data:
        out = {key: data[key] for key in data.files}
    version = int(out.get("meta/format_version", -1))
    if version != FORMAT_VERSION:
        raise StateError(f"unsupported checkpoint format {version} (expected {FORMAT_VERSION})")
    return out


def load_checkpoint(trainer, path):
    """Copy parameters, episode counter and RNG states from ``path`` into ``trainer``."""
    data = read_checkpoint(path)
    params = trainer.parameters()
    for key, target in params.items():
        if key not in data:
            raise StateError(f"checkpoint lacks {key}")
        if data[key].shape != target.shape:
            raise ShapeError(f"{key}: checkpoint {data[key].shape} vs model {target.shape}")
        target[...] = data[key]
    build_laplacian(trainer.graph)
    trainer.episode = int(data["meta/episode"])
    rng = json.loads(str(data["meta/rng"]))
    trainer.core.action_rng.bit_generator.state = rng["actions"]
    trainer.env_seeds.bit_generator.state = rng["env"]
    return trainer
