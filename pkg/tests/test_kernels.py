import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from netmech import _kernels
from netmech.network import Mode, _csr_arrays, build_network

from conftest import city, rail


def _random_csr(rng, n):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = [p for p in pairs if rng.random() < 0.6]
    cities = [city(f"N{i}") for i in range(n)]
    edges = [
        rail(f"E{k}", f"N{i}", f"N{j}", float(rng.integers(1, 50)))
        for k, (i, j) in enumerate(keep)
    ]
    net = build_network(cities, edges)
    usable = net.traversable(Mode.RAIL)
    return _csr_arrays(net, usable)


@pytest.mark.parametrize("seed", range(8))
def test_compiled_and_python_paths_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    _, edges, indptr, nbr, wt, eid = _random_csr(rng, n)
    dist_a, pred_a = _kernels.dijkstra_all(indptr, nbr, wt, eid, n)
    dist_b, pred_b = _kernels.dijkstra_all_py(indptr, nbr, wt, eid, n)
    assert np.array_equal(dist_a, dist_b)
    assert np.array_equal(pred_a, pred_b)
    if edges:
        node = {f"N{i}": i for i in range(n)}
        e_from = np.array([node[e.u] for e in edges], dtype=np.int64)
        e_other = np.array([node[e.v] for e in edges], dtype=np.int64)
        e_len = np.array([e.length for e in edges])
        e_r = np.zeros(len(edges), dtype=np.int64)
        out_a = _kernels.region_lengths(
            pred_a, dist_a, e_other, e_from, e_len, e_r, e_r, 1
        )
        out_b = _kernels.region_lengths_py(
            pred_b, dist_b, e_other, e_from, e_len, e_r, e_r, 1
        )
        assert np.array_equal(out_a, out_b)


def test_region_lengths_sum_to_distance():
    rng = np.random.default_rng(42)
    _, edges, indptr, nbr, wt, eid = _random_csr(rng, 7)
    n = 7
    dist, pred = _kernels.dijkstra_all_py(indptr, nbr, wt, eid, n)
    node = {f"N{i}": i for i in range(n)}
    e_from = np.array([node[e.u] for e in edges], dtype=np.int64)
    e_other = np.array([node[e.v] for e in edges], dtype=np.int64)
    e_len = np.array([e.length for e in edges])
    e_r = np.zeros(len(edges), dtype=np.int64)
    out = _kernels.region_lengths_py(
        pred, dist, e_other, e_from, e_len, e_r, e_r, 1
    )
    finite = np.isfinite(dist)
    np.fill_diagonal(finite, False)
    assert np.allclose(out[..., 0][finite], dist[finite])


def test_env_flag_disables_numba():
    code = textwrap.dedent(
        """
        from netmech import _kernels
        print(_kernels.NUMBA_ENABLED)
        """
    )
    env = dict(os.environ, NETMECH_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "False"


def test_fallback_mode_full_stack_matches():
    # the bundled scenario's first-year outcome must not depend on the backend
    code = textwrap.dedent(
        """
        import json
        from importlib import resources
        from pathlib import Path
        from netmech.scenario import load_scenario
        from netmech.sim import run_ivcg, compute_metrics

        path = Path(str(resources.files("netmech"))) / "data" / "mini_europe" / "scenario.yaml"
        state = load_scenario(path).build_state()
        run_ivcg(state)
        m = compute_metrics(state)
        print(json.dumps([m.system_social_welfare, m.subsidy_total]))
        """
    )
    outputs = []
    for flag in ("1", "0"):
        env = dict(os.environ, NETMECH_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.returncode == 0, out.stderr
        outputs.append(out.stdout.strip())
    assert outputs[0] == outputs[1]
