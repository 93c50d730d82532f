import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coxsys.ball import ball_enumerate  # noqa: E402


@pytest.fixture(scope="session")
def frozen():
    return json.loads((Path(__file__).parent / "data" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def ball_k4_r6():
    return ball_enumerate(4, 6, with_e_coords=True, use_cache=False)


@pytest.fixture(scope="session")
def ball_k5_r6():
    return ball_enumerate(5, 6, with_e_coords=True, use_cache=False)


@pytest.fixture(autouse=True)
def _no_ball_cache(monkeypatch):
    monkeypatch.delenv("COXSYS_CACHE_DIR", raising=False)
