import pytest

from mrfhcf import make_chain_fixture


@pytest.fixture
def chain():
    """The 8-site golden chain: (field, data)."""
    return make_chain_fixture()
