import doctest

import pytest

from ball_dirichlet import dirichlet, poisson, spherical


@pytest.mark.parametrize("module", [dirichlet, poisson, spherical], ids=lambda m: m.__name__)
def test_docstring_examples(module):
    result = doctest.testmod(module)
    assert result.failed == 0
