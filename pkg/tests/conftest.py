import os
from pathlib import Path

import numpy as np
import pytest

from incascade import (
    CampaignParams,
    DegreeDistribution,
    ParametricThresholds,
    PercolationModel,
    from_graph,
    generate_configuration_model,
)

DATA_ENV = "INCASCADE_DATA_DIR"
DATASETS = {
    "gnutella": ("p2p-Gnutella08.txt", "p2p-Gnutella08.edges", "gnutella.txt"),
    "hamsterster": ("out.petster-friendships-hamster-uniq", "out.petster-hamster", "hamsterster.txt", "hamsterster.edges"),
}


def dataset_path(name):
    """Edge list for a real network, looked up under $INCASCADE_DATA_DIR; None if absent."""
    root = os.environ.get(DATA_ENV)
    if not root:
        return None
    for fname in DATASETS[name]:
        path = Path(root) / fname
        if path.is_file():
            return path
    return None


def power_law_dist(k_min=3, k_max=30, exponent=2.5):
    ks = np.arange(k_min, k_max + 1)
    w = ks.astype(float) ** -exponent
    return DegreeDistribution(dict(zip(ks.tolist(), (w / w.sum()).tolist())))


def field_params():
    return ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9)


def random_small_dist(rng, support=3, k_max=12, k_min=1):
    ks = np.sort(rng.choice(np.arange(k_min, k_max + 1), size=support, replace=False))
    w = rng.uniform(0.2, 1.0, size=support)
    return DegreeDistribution(dict(zip(ks.tolist(), (w / w.sum()).tolist())), normalize=True)


@pytest.fixture(scope="session")
def tree_like_graph():
    """Erased configuration model, n = 1e5, power-law degrees 3..30."""
    return generate_configuration_model(power_law_dist(), 100_000, seed=11)


@pytest.fixture(scope="session")
def tree_like_model(tree_like_graph):
    th, pa = field_params()
    return PercolationModel(from_graph(tree_like_graph), th, pa)


@pytest.fixture
def closed_form_model():
    # 3-regular, z0 = 0.3, beta = 0.5, alpha = 1: u = 0.3 + 0.7 u^2
    return PercolationModel(DegreeDistribution({3: 1.0}), ParametricThresholds(0.3, 0.5), CampaignParams(1.0, 1.0))


ACCEPTANCE_LINES = []


def report(criterion, ok, detail=""):
    """Record one acceptance line; printed again in the terminal summary."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
