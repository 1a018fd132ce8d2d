"""Python smoke tests for the bound core module and the CLI binary."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

import fedsov


def test_watermark_matches_known_digest():
    # Frozen oracle: SHAKE-256("FEDSOV-WM-v1" || b"fixed test input")[:8].
    hexdigest = fedsov.generate_watermark_hex(b"fixed test input", 64)
    assert hexdigest == "c8266462bb30dc9c"


def test_hamming_distance():
    assert fedsov.hamming_distance_hex("00", "00", 8) == 0
    assert fedsov.hamming_distance_hex("00", "ff", 8) == 8
    assert fedsov.hamming_distance_hex("01", "03", 8) == 1


def test_shake256_matches_hashlib():
    import hashlib

    for data in (b"", b"abc", b"fedsov"):
        assert fedsov.shake256(data, 32) == hashlib.shake_256(data).digest(32)


def test_boundary_values():
    r = fedsov.solve_boundary(2048, -128)
    assert r.err_n == 366
    assert abs(r.r_n - 0.8217) < 0.002
    r = fedsov.solve_boundary(1024, -128)
    assert r.err_n == 153
    assert abs(r.r_n - 0.8505) < 0.002


def test_ball_size_log2():
    # S(16, 2) = 137
    assert math.isclose(
        fedsov.cumulative_ball_size_log2(16, 2), math.log2(137), rel_tol=1e-12
    )


def test_convergence_curve():
    [(n, v)] = fedsov.convergence_curve(0.025, [4096])
    assert n == 4096
    assert abs(v - 0.715) < 0.01


def test_attacker_bound():
    b = fedsov.attacker_bound_log2(16, 1, 100, 1)
    assert math.isclose(b, math.log2(100 * 137 / 65536), rel_tol=1e-12)


def test_signature_round_trip():
    scheme = fedsov.SignatureScheme.setup("desk_toy", 1)
    x, y, pk = scheme.keygen(7)
    sig = scheme.sign(x, y, b"challenge", 8)
    assert scheme.verify(b"challenge", sig, pk)
    assert not scheme.verify(b"different", sig, pk)
    _, _, other_pk = scheme.keygen(9)
    assert not scheme.verify(b"challenge", sig, other_pk)


def test_embed_and_extract():
    rng = np.random.default_rng(3)
    w0 = rng.normal(0, 0.3, size=128)
    target = fedsov.generate_watermark_hex(b"some public keys", 32)
    w, rate, converged = fedsov.embed_hex(w0, target, 32, seed=5)
    assert converged
    assert rate == 1.0
    assert fedsov.extract_hex(w, 32, seed=5) == target


def test_small_federation():
    out = fedsov.run_federation(clients=3, rounds=10, n_bits=32, omega=64, seed=5)
    assert out["final_detection"] >= 0.99
    assert out["final_accuracy"] > 0.5
    extracted = fedsov.extract_hex(out["gamma"], 32, seed=out["embed_seed"])
    assert extracted == out["watermark_hex"]


@pytest.mark.skipif("FEDSOV_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_boundary_subcommand():
    cli = os.environ["FEDSOV_CLI"]
    proc = subprocess.run(
        [cli, "boundary", "--n", "1024"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    header, row = proc.stdout.strip().splitlines()
    assert header.startswith("n,")
    fields = row.split(",")
    assert fields[0] == "1024"
    assert int(fields[2]) == 153


@pytest.mark.skipif("FEDSOV_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_end_to_end(tmp_path):
    cli = os.environ["FEDSOV_CLI"]
    run_dir = str(tmp_path / "run")
    sim = subprocess.run(
        [
            cli, "--seed", "5", "--out-dir", run_dir, "simulate",
            "--clients", "3", "--rounds", "10", "--wm-bits", "256",
            "--omega", "512",
        ],
        capture_output=True,
        text=True,
    )
    assert sim.returncode == 0, sim.stderr
    summary = json.loads(sim.stdout)
    assert summary["final_detection"] >= 0.99

    ver = subprocess.run(
        [cli, "verify", "--run-dir", run_dir, "--client", "1"],
        capture_output=True,
        text=True,
    )
    assert ver.returncode == 0, ver.stderr
    transcript = json.loads(ver.stdout)
    assert transcript["verdict"] == "owner_verified"

    adv = subprocess.run(
        [cli, "verify", "--run-dir", run_dir, "--client", "1", "--adversary"],
        capture_output=True,
        text=True,
    )
    assert adv.returncode == 2
    assert json.loads(adv.stdout)["verdict"] == "signature_failed"
