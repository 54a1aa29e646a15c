"""Benchmark the numba kernels against their pure-numpy twins.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times Bellman and soft-Bellman value iteration across problem sizes, once per
backend, after a warm-up call so numba's compilation does not count. At the
tiny sizes the claim harness uses, per-call dispatch overhead dominates and
numba wins by keeping the sweep in one compiled loop; at larger sizes the
vectorized numpy twin closes most of the gap.
"""

import argparse
import time

import numpy as np

from rewardlab import _kernels

SIZES = [(3, 2), (5, 3), (10, 4), (25, 5), (50, 5), (100, 8)]
GAMMA = 0.95
TOL = 1e-10
MAX_ITER = 10**6


def _instance(n_states, n_actions, seed):
    rng = np.random.default_rng(seed)
    tau = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    rsa = rng.uniform(-1, 1, size=(n_states, n_actions))
    return tau, rsa


def _time(fn, args, repeats):
    fn(*args)  # warm-up (JIT compile / cache load)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        v, iters = fn(*args)
        best = min(best, time.perf_counter() - t0)
        assert iters > 0
    return best, v


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; benchmarking the numpy path only")

    rows = []
    for n_states, n_actions in SIZES:
        tau, rsa = _instance(n_states, n_actions, seed=n_states)
        for label, hard, soft in (
            ("hard", _kernels.value_iteration_numpy, None),
            ("soft", None, _kernels.soft_value_iteration_numpy),
        ):
            if label == "hard":
                np_args = (tau, rsa, GAMMA, TOL, MAX_ITER)
                np_time, v_np = _time(_kernels.value_iteration_numpy, np_args, args.repeats)
                if _kernels.HAVE_NUMBA:
                    nb_time, v_nb = _time(_kernels.value_iteration_numba, np_args, args.repeats)
            else:
                np_args = (tau, rsa, GAMMA, 0.5, TOL, MAX_ITER)
                np_time, v_np = _time(_kernels.soft_value_iteration_numpy, np_args, args.repeats)
                if _kernels.HAVE_NUMBA:
                    nb_time, v_nb = _time(_kernels.soft_value_iteration_numba, np_args, args.repeats)
            if _kernels.HAVE_NUMBA:
                assert np.abs(v_np - v_nb).max() < 1e-8
                rows.append((label, n_states, n_actions, np_time, nb_time, np_time / nb_time))
            else:
                rows.append((label, n_states, n_actions, np_time, float("nan"), float("nan")))

    print(f"{'sweep':<6}{'S':>5}{'A':>4}{'numpy (ms)':>13}{'numba (ms)':>13}{'speedup':>9}")
    for label, s, a, np_t, nb_t, speedup in rows:
        print(f"{label:<6}{s:>5}{a:>4}{np_t * 1e3:>13.3f}{nb_t * 1e3:>13.3f}{speedup:>9.1f}")


if __name__ == "__main__":
    main()
