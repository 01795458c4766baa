"""
Shared fixtures for mfaoa tests.
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path for all tests
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from mfaoa.problems import (  # noqa: E402
    custom_instance,
    partition_instance,
    sk_instance,
)


def cleanup_test_environment():
    """Clean up test environment variables."""
    env_vars_to_clean = [
        "MFAOA_THREADS",
        "MFAOA_LOG_LEVEL",
        "MFAOA_LOG_DIR",
        "MFAOA_ERROR_LOG",
    ]
    for var in env_vars_to_clean:
        os.environ.pop(var, None)


@pytest.fixture(autouse=True)
def clean_environment():
    cleanup_test_environment()
    yield
    cleanup_test_environment()


@pytest.fixture
def sk11():
    return sk_instance(11, seed=7)


@pytest.fixture
def sk6():
    return sk_instance(6, seed=3)


@pytest.fixture
def partition8():
    return partition_instance(8, seed=5)


@pytest.fixture
def fielded4():
    """Small instance with nonzero fields and a non-uniform driver."""
    couplings = np.array(
        [
            [0.0, 0.4, -0.3, 0.2],
            [0.4, 0.0, 0.5, -0.1],
            [-0.3, 0.5, 0.0, 0.6],
            [0.2, -0.1, 0.6, 0.0],
        ]
    )
    return custom_instance(
        couplings,
        fields=[0.3, -0.2, 0.1, 0.25],
        driver=[1.0, 0.8, 1.2, 0.9],
    )
