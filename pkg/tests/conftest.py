from __future__ import annotations

import pytest

from meadowkit.meadows import make_meadow

# finite meadows small enough for exhaustive three-variable scans
FLEET = [
    "zp:2",
    "zp:3",
    "zp:5",
    "zp:7",
    "zsf:6",
    "zsf:10",
    "zsf:15",
    "prod:[zp:2,zp:3]",
    "prod:[zp:2,zp:2]",
    "prod:[zp:3,zp:3]",
    "gen:[prod:[zp:2,zp:2]]",
]


@pytest.fixture(params=FLEET)
def finite_meadow(request):
    return make_meadow(request.param)
