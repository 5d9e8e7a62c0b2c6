import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

from frailhaz import pvf  # noqa: E402

FAMILIES = [
    pvf.PvfFamily.gamma(),
    pvf.PvfFamily.inverse_gaussian(),
    pvf.PvfFamily.hougaard(-0.125),
    pvf.PvfFamily.compound_poisson(0.1),
]


@pytest.fixture(params=FAMILIES, ids=lambda f: f.label)
def family(request):
    return request.param
