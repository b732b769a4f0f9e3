import itertools
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from netlocal.network import LocalModel, NetworkTopology

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def brute_behaviour(model: LocalModel) -> np.ndarray:
    """Behaviour by explicit summation over every hidden-value tuple."""
    top = model.topology
    n = top.party_count
    out = np.zeros(top.outputs + top.inputs)
    for hidden in itertools.product(*(range(len(s)) for s in model.sources)):
        weight = np.prod([model.sources[k][h] for k, h in enumerate(hidden)])
        if weight == 0:
            continue
        for outs in itertools.product(*(range(m) for m in top.outputs)):
            for ins in itertools.product(*(range(M) for M in top.inputs)):
                term = weight
                for i in range(n):
                    idx = (outs[i], ins[i]) + tuple(hidden[k] for k in top.party_sources[i])
                    term *= model.responses[i][idx]
                out[outs + ins] += term
    return out


def random_model(topology: NetworkTopology, cards, rng, concentration=1.0) -> LocalModel:
    sources = [rng.dirichlet([concentration] * c) for c in cards]
    responses = []
    for i in range(topology.party_count):
        shape = topology.response_shape(i, cards)
        rows = rng.dirichlet([concentration] * shape[0], size=shape[1:])
        responses.append(np.moveaxis(rows, -1, 0))
    return LocalModel(topology, sources, responses)


FOUR_PARTY = NetworkTopology((2, 2, 3, 2), (2, 1, 1, 2), wiring=((0, 1), (1, 2, 3), (3,)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
