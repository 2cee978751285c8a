import pytest

from updyn.symbolic.core import BI_INFINITE, ONE_SIDED
from updyn.symbolic.star import star_sequence
from updyn.utils.slack import SLACK_TOKEN_ENV


@pytest.fixture
def no_slack_token(monkeypatch):
    monkeypatch.delenv(SLACK_TOKEN_ENV, raising=False)


@pytest.fixture
def one_sided_star():
    return star_sequence(ONE_SIDED)


@pytest.fixture
def bi_infinite_star():
    return star_sequence(BI_INFINITE)
