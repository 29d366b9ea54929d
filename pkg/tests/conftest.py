"""Shared fixtures: synthesized videos prepped once per session."""

import pytest


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        label = report.nodeid.split("::")[-1]
        verdict = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {label}: {verdict}", flush=True)

from ltcgif.ltc_model import ContainerGeometry
from ltcgif.origin import OriginServer
from ltcgif.prep import prep, synthesize_test_video

GEOM_60 = ContainerGeometry()  # default 5x5 of 160x90, 1 s interval
GEOM_SMALL = ContainerGeometry(tile_width=80, tile_height=60)


@pytest.fixture(scope="session")
def media_root(tmp_path_factory):
    """Origin root with two prepped fixtures: fix60 (30 fps) and fix61 (5 fps)."""
    root = tmp_path_factory.mktemp("origin-root")
    src = tmp_path_factory.mktemp("sources")

    video60 = synthesize_test_video(60, 30, src / "fix60.avi", size=(320, 240))
    meta60 = prep(video60, root / "fix60", segment_duration=10.0, geometry=GEOM_60)

    video61 = synthesize_test_video(61, 5, src / "fix61.avi", size=(160, 120))
    meta61 = prep(video61, root / "fix61", segment_duration=10.0, geometry=GEOM_SMALL)

    return {
        "root": root,
        "sources": {"fix60": video60, "fix61": video61},
        "meta": {"fix60": meta60, "fix61": meta61},
    }


@pytest.fixture
def origin(media_root):
    server = OriginServer(media_root["root"])
    yield server
    server.close()
