import sys
import warnings
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(autouse=True)
def _quiet_span_warnings():
    # small ensembles are deliberate in unit tests; the span advisories stay
    # enabled for library users
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*correlation times.*")
        yield
