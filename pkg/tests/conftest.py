"""Shared fixtures: builtin states and the four-mode reference witness."""
from __future__ import annotations

import numpy as np
import pytest

from cvwitness import WitnessPair, builtin_state, make_state

# Witness certifying genuine four-partite entanglement of the klev4 state.
GENUINE_X = np.array(
    [
        [0.39234, -0.20267, 0.24691, 0.30527],
        [-0.20267, 0.88526, 0.09450, 0.09080],
        [0.24691, 0.09450, 0.58391, 0.20795],
        [0.30527, 0.09080, 0.20795, 0.39504],
    ]
)
GENUINE_P = np.array(
    [
        [0.22992, -0.13140, -0.00477, -0.11723],
        [-0.13140, 0.52598, -0.32316, -0.16699],
        [-0.00477, -0.32316, 0.39949, 0.06971],
        [-0.11723, -0.16699, 0.06971, 0.31242],
    ]
)

# Reference optima: per bipartition, the attained bound and the freed entries
# of X and P at the maximum (upper triangle, 0-based).
CERTIFICATE_EDITS = {
    "1|234": (
        1.65474,
        {(0, 1): -0.10873, (0, 2): 0.158136, (0, 3): 0.116524},
        {(0, 1): -0.11914, (0, 2): 0.113758, (0, 3): 0.083761},
    ),
    "2|134": (
        1.66193,
        {(0, 1): -0.07310, (1, 2): -0.03586, (1, 3): -0.01993},
        {(0, 1): -0.05400, (1, 2): -0.01432, (1, 3): 0.02340},
    ),
    "3|124": (
        1.56935,
        {(0, 2): 0.22149, (1, 2): -0.01671, (2, 3): 0.24154},
        {(0, 2): 0.02836, (1, 2): -0.07629, (2, 3): 0.12842},
    ),
    "4|123": (
        1.63974,
        {(0, 3): 0.15483, (1, 3): 0.04047, (2, 3): 0.23966},
        {(0, 3): 0.05094, (1, 3): -0.05608, (2, 3): 0.12953},
    ),
    "12|34": (
        1.81056,
        {(0, 2): 0.19766, (0, 3): 0.11649, (1, 2): -0.02260, (1, 3): 0.03156},
        {(0, 2): 0.11949, (0, 3): 0.06522, (1, 2): -0.02001, (1, 3): 0.02362},
    ),
    "13|24": (
        1.74993,
        {(0, 1): -0.10013, (0, 3): 0.12997, (1, 2): -0.03695, (2, 3): 0.25436},
        {(0, 1): -0.07273, (0, 3): 0.06225, (1, 2): -0.05209, (2, 3): 0.17734},
    ),
    "14|23": (
        1.56114,
        {(0, 1): -0.11435, (0, 2): 0.18571, (1, 3): -0.02360, (2, 3): 0.25307},
        {(0, 1): -0.09531, (0, 2): 0.05497, (1, 3): -0.02171, (2, 3): 0.12643},
    ),
}


def _edited(M: np.ndarray, edits: dict) -> np.ndarray:
    out = M.copy()
    for (i, j), v in edits.items():
        out[i, j] = out[j, i] = v
    return out


@pytest.fixture(scope="session")
def klev4():
    return builtin_state("klev4")


@pytest.fixture(scope="session")
def ppt4():
    return builtin_state("ppt4")


@pytest.fixture(scope="session")
def vacuum4():
    sig = 0.01 * np.ones((4, 4))
    return make_state(0.5 * np.eye(4), 0.5 * np.eye(4), sig, sig, label="vacuum4")


@pytest.fixture(scope="session")
def genuine_witness():
    return WitnessPair(GENUINE_X, GENUINE_P)


@pytest.fixture(scope="session")
def printed_certificates():
    """Map partition text -> (reference bound, X', P')."""
    return {
        text: (value, _edited(GENUINE_X, ex), _edited(GENUINE_P, ep))
        for text, (value, ex, ep) in CERTIFICATE_EDITS.items()
    }
