import pytest


@pytest.fixture
def criterion_line(capfd):
    """Print an uncaptured one-line verdict for an acceptance criterion."""

    def _print(number: int, ok: bool, detail: str) -> None:
        with capfd.disabled():
            print(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}")

    return _print
