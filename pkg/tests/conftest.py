import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dcfs.model import build_topology, train_offline, train_offline_shared  # noqa: E402
from dcfs.synth import SynthConfig, make_dataset, synthetic_returns  # noqa: E402

N_TRAIN = 2000


@pytest.fixture(scope="session")
def bench_returns():
    return synthetic_returns(SynthConfig(seed=0))


@pytest.fixture(scope="session")
def bench_dataset(bench_returns):
    return make_dataset(bench_returns, 11)


@pytest.fixture(scope="session")
def bench_split(bench_dataset):
    return bench_dataset.split(N_TRAIN)


@pytest.fixture(scope="session")
def bench_model(bench_split):
    return train_offline(bench_split[0], build_topology(11, 3, 1, 20))


@pytest.fixture(scope="session")
def bench_shared_model(bench_split):
    return train_offline_shared(bench_split[0], build_topology(11, 3, 1, 20, shared=True))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
