import warnings

import pytest

# Adaptive quadrature of endpoint-singular beta integrands triggers harmless
# roundoff warnings inside the oracle; keep test output clean.
warnings.filterwarnings("ignore", message=".*roundoff error.*")


def pytest_collection_modifyitems(config, items):
    # Acceptance tests run last so fast unit failures surface first.
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")
