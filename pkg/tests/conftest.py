import pytest

from fuim import default_membership_function, load_database
from fuim.cli import bundled_sample_paths

import helpers


@pytest.fixture(scope="session")
def bundled_mf():
    return default_membership_function()


@pytest.fixture(scope="session")
def sample_db():
    qdb, eu, _ = bundled_sample_paths()
    return load_database(qdb, eu)


@pytest.fixture(scope="session")
def corpus(bundled_mf):
    """200 fixed-seed random databases with oracle ground truth attached."""
    return helpers.build_corpus()
