import csv

from click.testing import CliRunner

from shotvod import cli
from shotvod.daemon import DaemonConfig, StorageDaemon


def test_parse_endpoint():
    assert cli._parse_endpoint(":9000") == ("127.0.0.1", 9000)
    assert cli._parse_endpoint("10.0.0.5:9001") == ("10.0.0.5", 9001)
    assert cli._parse_endpoint(":8080", default_host="0.0.0.0") == ("0.0.0.0", 8080)


def test_acq_produce_daemon_down(tmp_path):
    result = CliRunner().invoke(cli.acq, [
        "produce", "--shot", "5", "--incoming", str(tmp_path / "in"),
        "--daemon", "127.0.0.1:1", "--duration", "0.1",
    ])
    assert result.exit_code == 1
    assert "error:" in result.output
    # frames stay on disk for a retried notification
    assert (tmp_path / "in" / "5" / "WK-IR" / "times.txt").exists()


def test_acq_produce_against_daemon(tmp_path):
    daemon = StorageDaemon(DaemonConfig(
        store_root=tmp_path / "store", incoming_dir=tmp_path / "in",
        host="127.0.0.1", port=0,
    ))
    daemon.start()
    try:
        result = CliRunner().invoke(cli.acq, [
            "produce", "--shot", "7", "--incoming", str(tmp_path / "in"),
            "--daemon", f"127.0.0.1:{daemon.port}",
            "--fps", "10", "--duration", "0.3", "--width", "16", "--height", "12",
        ])
        assert result.exit_code == 0, result.output
        assert "3 frames" in result.output
        assert "accepted" in result.output
    finally:
        daemon.stop()


def test_vodbench_single_profile(tmp_path):
    out = tmp_path / "results.csv"
    result = CliRunner().invoke(cli.vodbench, [
        "--profiles", "77212", "--reps", "1", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert "77212" in result.output
    with open(out) as fh:
        assert len(list(csv.DictReader(fh))) == 1


def test_vodbench_bad_profiles():
    result = CliRunner().invoke(cli.vodbench, ["--profiles", "nope"])
    assert result.exit_code == 1
