"""End-to-end test of the CLI's --server mode against a live HTTP service."""

import json
import socket
import threading
import time

import httpx
import pytest
import uvicorn

from frobdyn.cli import main
from frobdyn.service.app import app


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def server_url():
    port = _free_port()
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    for _ in range(100):
        try:
            if httpx.get(url + "/healthz", timeout=1.0).status_code == 200:
                break
        except httpx.HTTPError:
            time.sleep(0.05)
    else:
        pytest.skip("service did not come up")
    yield url
    server.should_exit = True
    thread.join(timeout=5)


def test_remote_analyze_matches_local(server_url, tmp_path, capsys):
    doc = {
        "p": 3,
        "d": 1,
        "group": [{"type": "torus", "rank": 3}],
        "map": {
            "blocks": [[[1, 0, 0], [0, 3, 0], [0, 0, 3]]],
            "translation": ["1", "1", "1"],
        },
    }
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(doc))
    code = main(["analyze", str(path)])
    local = capsys.readouterr().out
    code_remote = main(["--server", server_url, "analyze", str(path)])
    remote = capsys.readouterr().out
    assert code == code_remote == 0
    assert json.loads(local) == json.loads(remote)


def test_remote_input_error_exit_code(server_url, tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"p": 4, "d": 1, "group": [], "map": {"blocks": []}}))
    code = main(["--server", server_url, "analyze", str(path)])
    err = capsys.readouterr().err
    assert code == 2
    assert "prime" in err
