import pytest

_VERDICTS: dict[int, tuple[str, str, str]] = {}


class Recorder:
    def __call__(self, number: int, title: str, passed: bool | None, detail: str = ""):
        tag = "INFO" if passed is None else ("PASS" if passed else "FAIL")
        _VERDICTS[number] = (tag, title, detail)
        return passed


@pytest.fixture(scope="session")
def criterion():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        tag, title, detail = _VERDICTS[number]
        line = f"[{tag}] {number}. {title}"
        terminalreporter.write_line(f"{line}: {detail}" if detail else line)
