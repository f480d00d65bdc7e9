from __future__ import annotations

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from src.app.model_io import load_model
from src.core.prob import X, Y1, Y2, HypothesisPair, JointPmf

MODELS = Path(__file__).resolve().parent.parent / "models"
AXES = (X, Y1, Y2)


def random_law(rng: np.random.Generator, shape: tuple[int, ...] = (2, 2, 2)) -> JointPmf:
    """Full-support law: half Dirichlet draw, half uniform."""
    cells = int(np.prod(shape))
    probs = 0.5 * rng.dirichlet(np.ones(cells)) + 0.5 / cells
    return JointPmf.from_table(AXES, probs.reshape(shape), normalize=True)


@pytest.fixture
def models_dir() -> Path:
    return MODELS


@pytest.fixture
def example1() -> HypothesisPair:
    return load_model(MODELS / "example1.json")


@pytest.fixture
def example6() -> HypothesisPair:
    return load_model(MODELS / "example6.json")


@pytest.fixture
def markov_y2_between() -> HypothesisPair:
    """X - Y2 - Y1 under both laws."""
    return load_model(MODELS / "markov_x_y2_y1.json")


@pytest.fixture
def markov_y1_between() -> HypothesisPair:
    """X - Y1 - Y2 under both laws."""
    return load_model(MODELS / "markov_x_y1_y2.json")


@pytest.fixture
def random_pair() -> Callable[[int], HypothesisPair]:
    def make(seed: int) -> HypothesisPair:
        rng = np.random.default_rng(seed)
        return HypothesisPair(random_law(rng), random_law(rng), name=f"random-{seed}")

    return make


@pytest.fixture
def identical_pair() -> HypothesisPair:
    law = random_law(np.random.default_rng(11))
    return HypothesisPair(law, law, name="identical")


@pytest.fixture
def product_tradeoff() -> HypothesisPair:
    """X, Y1 and Y2 mutually independent under both laws."""
    return load_model(MODELS / "product_tradeoff.json")
