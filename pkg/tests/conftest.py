from __future__ import annotations

import pytest
from hypothesis import settings

from .oracles import ACCEPTANCE

settings.register_profile("fcert", deadline=None, max_examples=200)
settings.load_profile("fcert")


@pytest.fixture
def report_dir(tmp_path, monkeypatch):
    monkeypatch.delenv("FC_OUT", raising=False)
    return tmp_path / "reports"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} {msg}")
