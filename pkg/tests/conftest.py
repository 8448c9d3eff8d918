import pytest

from helpers import make_vocab


@pytest.fixture
def vocab_ab():
    """5 tokens total, 4 predictable: {eos, unk, a, b}."""
    return make_vocab("a", "b")
