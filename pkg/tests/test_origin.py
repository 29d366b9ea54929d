"""Static-serving fidelity, request logging, and fault injection."""

import pytest
import requests

from ltcgif.errors import LtcgifError
from ltcgif.origin import FaultPlan, OriginServer


class TestServing:
    def test_playlist_served_byte_exact(self, media_root, origin):
        on_disk = (media_root["root"] / "fix60" / "playlist.m3u8").read_bytes()
        resp = requests.get(f"{origin.base_url}/video/fix60/playlist.m3u8")
        assert resp.status_code == 200
        assert resp.content == on_disk

    def test_segment_served_byte_exact(self, media_root, origin):
        on_disk = (media_root["root"] / "fix60" / "seg" / "0.ts").read_bytes()
        resp = requests.get(f"{origin.base_url}/video/fix60/seg/0.ts")
        assert resp.content == on_disk
        assert resp.headers["Content-Type"] == "video/mp2t"

    def test_missing_resource_404(self, origin):
        assert requests.get(f"{origin.base_url}/video/fix60/seg/99.ts").status_code == 404
        assert requests.get(f"{origin.base_url}/video/ghost/playlist.m3u8").status_code == 404

    def test_paths_outside_video_scheme_404(self, origin):
        assert requests.get(f"{origin.base_url}/etc/passwd").status_code == 404
        assert requests.get(f"{origin.base_url}/video/../../etc/passwd").status_code == 404


class TestRequestLog:
    def test_fresh_server_log_empty(self, origin):
        assert origin.snapshot_log() == []

    def test_entries_in_arrival_order(self, origin):
        requests.get(f"{origin.base_url}/video/fix60/playlist.m3u8")
        requests.get(f"{origin.base_url}/video/fix60/storyboard.json")
        log = origin.snapshot_log()
        assert [e.path for e in log] == [
            "/video/fix60/playlist.m3u8",
            "/video/fix60/storyboard.json",
        ]
        assert all(e.status == 200 for e in log)
        assert all(e.bytes_sent > 0 for e in log)

    def test_identical_gets_log_twice(self, origin):
        url = f"{origin.base_url}/video/fix60/storyboard.json"
        a, b = requests.get(url), requests.get(url)
        assert a.content == b.content
        assert len([e for e in origin.snapshot_log() if e.path.endswith("storyboard.json")]) == 2

    def test_jsonl_dump(self, origin, tmp_path):
        requests.get(f"{origin.base_url}/video/fix60/playlist.m3u8")
        out = tmp_path / "log.jsonl"
        origin.dump_log_jsonl(out)
        import json
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        assert lines[0]["path"] == "/video/fix60/playlist.m3u8"
        assert lines[0]["status"] == 200


class TestFaultInjection:
    def test_forced_503_then_normal(self, media_root):
        plan = FaultPlan({"*/seg/0.ts": [503, 200]})
        with OriginServer(media_root["root"], fault_plan=plan) as server:
            url = f"{server.base_url}/video/fix60/seg/0.ts"
            assert requests.get(url).status_code == 503
            assert requests.get(url).status_code == 200
            assert requests.get(url).status_code == 200  # plan exhausted
            statuses = [e.status for e in server.snapshot_log()]
            assert statuses == [503, 200, 200]

    def test_fault_plan_from_file(self, media_root, tmp_path):
        plan_file = tmp_path / "faults.json"
        plan_file.write_text('{"*/playlist.m3u8": [500]}')
        with OriginServer(media_root["root"], fault_plan=FaultPlan.from_file(plan_file)) as server:
            assert requests.get(f"{server.base_url}/video/fix60/playlist.m3u8").status_code == 500


class TestStartup:
    def test_bind_conflict_is_startup_error(self, media_root, origin):
        taken_port = int(origin.base_url.rsplit(":", 1)[1])
        with pytest.raises(LtcgifError, match="bind"):
            OriginServer(media_root["root"], port=taken_port)

    def test_missing_root_rejected(self, tmp_path):
        with pytest.raises(LtcgifError, match="not a directory"):
            OriginServer(tmp_path / "nope")
