import json
from pathlib import Path

import pytest

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


def frozen_complex(key, sub=None):
    v = FROZEN[key] if sub is None else FROZEN[key][sub]
    return complex(v[0], v[1])


@pytest.fixture(scope="session")
def frozen():
    return FROZEN
