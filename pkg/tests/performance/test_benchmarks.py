# tests/performance/test_benchmarks.py
import subprocess
import sys

import pytest

from shiftlab.core.ckalg import theorem813_images, verify_ck_family
from shiftlab.core.codes import ConjugacyWitness, HigherBlockMap, verify_conjugacy
from shiftlab.core.graphs import higher_block_graph
from shiftlab.core.seqcore import Seq
from shiftlab.core.spaces import EdgeShift, block_language, hub_pairs, rebuild_from_forbidden

CLI_CMD = [sys.executable, "-m", "shiftlab.cli"]

# -------------------------------
# Shift Space Benchmarks
# -------------------------------

@pytest.mark.benchmark(group="spaces")
def test_block_language_benchmark(benchmark, g1_shift):
    def run_blocks():
        language = block_language(g1_shift, 8)
        assert not language.partial

    benchmark(run_blocks)


@pytest.mark.benchmark(group="spaces")
def test_rebuild_benchmark(benchmark):
    hub = hub_pairs()

    def run_rebuild():
        rebuilt = rebuild_from_forbidden(hub, 4, 6)
        assert block_language(rebuilt, 4, 6).words == block_language(hub, 4, 6).words

    benchmark(run_rebuild)

# -------------------------------
# Code and Algebra Benchmarks
# -------------------------------

@pytest.mark.benchmark(group="codes")
def test_verify_conjugacy_benchmark(benchmark, g1, g1_shift, phi2, pi2):
    witness = ConjugacyWitness(phi2, pi2, g1_shift, EdgeShift(higher_block_graph(g1, 2)))
    samples = [Seq.periodic((), ("e", "f")), Seq.periodic(("e",), ("g",))]

    def run_verify():
        assert str(verify_conjugacy(witness, 5, samples)) == "verified to depth 5"

    benchmark(run_verify)


@pytest.mark.benchmark(group="ckalg")
def test_ck_family_benchmark(benchmark, g1, g1_hb2):
    def run_ck():
        images = theorem813_images(g1, g1_hb2, HigherBlockMap(2))
        assert verify_ck_family(images, g1).valid

    benchmark(run_ck)

# -------------------------------
# CLI Benchmarks
# -------------------------------

@pytest.mark.benchmark(group="cli")
def test_cli_blocks_benchmark(benchmark, files):
    def run_cli():
        result = subprocess.run(
            CLI_CMD + ["blocks", "--shift", str(files["g1.shift"]), "--n", "4", "--format=lines"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert result.stdout.startswith("block\t")

    benchmark(run_cli)
