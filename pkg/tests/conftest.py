import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# acceptance results, filled by the ``acceptance`` fixture and printed at the end
_RESULTS = pytest.StashKey[dict]()
CRITERIA = {
    1: "earnest roundtrip",
    2: "r=0 degeneracy",
    3: "alternative (A) on random covers",
    4: "goodness vs level-function search",
    5: "smooth-lift soundness",
    6: "exactness vs termwise oracle",
    7: "classification fixtures",
    8: "selftest determinism",
}


@pytest.fixture
def acceptance(request):
    results = request.config.stash.setdefault(_RESULTS, {})

    def record(k, ok, detail):
        results[k] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k, name in CRITERIA.items():
        if k in results:
            ok, detail = results[k]
            terminalreporter.write_line(f"ACCEPTANCE {k} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
        else:
            terminalreporter.write_line(f"ACCEPTANCE {k} {name}: FAIL (not run or errored)")
