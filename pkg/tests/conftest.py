import random

import numpy as np
import pytest

from imgshare.imagecodec import ImagePayload

_criteria: list[tuple[str, str]] = []


def random_image(width: int, height: int, rng: random.Random) -> ImagePayload:
    pixels = np.frombuffer(rng.randbytes(3 * width * height), dtype=np.uint8)
    return ImagePayload(width, height, pixels.reshape(height, width, 3).copy())


@pytest.fixture
def rng():
    return random.Random(20240617)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = dict(report.user_properties).get("criterion")
    if label:
        if "[" in report.nodeid:
            label += " [" + report.nodeid.split("[", 1)[1]
        _criteria.append((label, report.outcome.upper()))


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker:
        item.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _criteria:
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {label}")
