import os
import subprocess
import sys

from bpreduce import kernels


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("BPREDUCE_PURE_PYTHON", None)
    else:
        env["BPREDUCE_PURE_PYTHON"] = env_value
    out = subprocess.run([sys.executable, "-c", "import bpreduce; print(bpreduce.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    return out.stdout.strip()


def test_environment_forces_pure_python():
    assert _backend_in_subprocess("1") == "python"


def test_default_backend_prefers_compiled():
    expected = "cython" if "cython" in kernels.available_backends() else "python"
    assert _backend_in_subprocess(None) == expected


def test_fallback_results_identical_under_forced_python():
    env = dict(os.environ, BPREDUCE_PURE_PYTHON="1")
    code = "from bpreduce.lattice_enum import count_series; print(count_series(3, 6))"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
    from bpreduce.lattice_enum import count_series

    assert out.stdout.strip() == str(count_series(3, 6))


def test_compiled_kernel_refuses_when_missing(monkeypatch):
    monkeypatch.setattr(kernels, "_compiled", None)
    try:
        kernels.count_animals(2, 3, backend="cython")
    except RuntimeError as exc:
        assert "not available" in str(exc)
    else:
        raise AssertionError("expected RuntimeError")
    assert kernels.available_backends() == ["python"]


def test_benchmark_script_runs(tmp_path, monkeypatch, capsys):
    import importlib.util
    import json
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    monkeypatch.setattr(bench, "WORKLOADS", ((2, 5), (3, 4)))
    out = tmp_path / "bench.json"
    assert bench.main(["--repeat", "1", "--json", str(out)]) == 0
    rows = json.loads(out.read_text())["rows"]
    assert [r["c_nmax"] for r in rows] == [87, 95]
