import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import infospec as I  # noqa: E402
from infospec.models import ChannelModel, JointSourceModel, SourceModel  # noqa: E402

MODELS_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "models")


def bsc_mixture():
    return ChannelModel.mixture([0.5, 0.5], [I.binary_symmetric_channel(0.02),
                                             I.binary_symmetric_channel(0.3)])


def dsbs_mixture():
    return JointSourceModel.mixture([0.5, 0.5], [I.doubly_symmetric_source(0.05),
                                                 I.doubly_symmetric_source(0.2)])


def markov_source():
    return SourceModel.markov([0.5, 0.5], [[0.9, 0.1], [0.2, 0.8]])


@pytest.fixture
def models_dir():
    return MODELS_DIR


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
