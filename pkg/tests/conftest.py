import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ehrgate import GatewayService, RecordStore, load_catalog
from ehrgate.synth import SynthConfig, gen_enrollee_templates, gen_patient


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture
def store(catalog):
    s = RecordStore(catalog=catalog)
    yield s
    s.close()


@pytest.fixture
def service(store):
    store.add_doctor("drwho", "gallifrey", "Dr Who")
    return GatewayService(store)


@pytest.fixture
def enrolled(store, catalog):
    """Three enrolled synthetic patients; returns list of enrollment info dicts."""
    cfg = SynthConfig(seed=42)
    out = []
    for i in range(3):
        iris_t, fp_t = gen_enrollee_templates(cfg, i)
        demographics, values = gen_patient(1000 + i, catalog)
        ref, key = store.enroll_patient(demographics, values, [iris_t], [fp_t])
        out.append(
            {"ref": ref, "key": key, "iris": iris_t, "fingerprint": fp_t, "values": values}
        )
    return out
