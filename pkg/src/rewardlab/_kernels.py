"""Hot inner loops: Bellman and soft-Bellman value iteration.

These two fixed-point sweeps are the only unbounded-iteration loops in the
package and they run thousands of times inside the claim harness, so they are
JIT-compiled with numba when it is importable. Setting ``REWARDLAB_PURE_NUMPY``
to a non-empty value other than ``0``/``false`` forces the vectorized numpy
twins instead; the numpy path is also the automatic fallback when numba is
missing. Both backends implement identical recursions and converge to the same
fixed points (they may differ in the last couple of ulps because summation
order differs).

Each kernel returns ``(v, iterations)`` where ``iterations == -1`` signals
that the cap was exhausted before the sup-norm update dropped below ``tol``;
callers turn that into a ConvergenceError.
"""

import os

import numpy as np

ENV_FLAG = "REWARDLAB_PURE_NUMPY"


def _env_forces_numpy(environ=os.environ) -> bool:
    return environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false")


def value_iteration_numpy(tau, rsa, gamma, tol, max_iter):
    """Iterate v <- max_a [r(s,a) + gamma * tau(s,a,.) . v] to sup-norm tol."""
    v = np.zeros(tau.shape[0])
    for it in range(max_iter):
        q = rsa + gamma * (tau @ v)
        v_new = q.max(axis=1)
        delta = np.abs(v_new - v).max()
        v = v_new
        if delta <= tol:
            return v, it + 1
    return v, -1


def soft_value_iteration_numpy(tau, rsa, gamma, alpha, tol, max_iter):
    """Iterate v <- alpha * logsumexp_a(q / alpha), with per-state max subtraction."""
    v = np.zeros(tau.shape[0])
    for it in range(max_iter):
        q = rsa + gamma * (tau @ v)
        m = q.max(axis=1)
        v_new = m + alpha * np.log(np.exp((q - m[:, None]) / alpha).sum(axis=1))
        delta = np.abs(v_new - v).max()
        v = v_new
        if delta <= tol:
            return v, it + 1
    return v, -1


try:  # pragma: no cover - exercised indirectly through the selected backend
    import numba

    @numba.njit(cache=True)
    def value_iteration_numba(tau, rsa, gamma, tol, max_iter):
        n_states, n_actions = rsa.shape
        v = np.zeros(n_states)
        for it in range(max_iter):
            v_new = np.empty(n_states)
            delta = 0.0
            for s in range(n_states):
                best = -np.inf
                for a in range(n_actions):
                    acc = rsa[s, a]
                    for sp in range(n_states):
                        acc += gamma * tau[s, a, sp] * v[sp]
                    if acc > best:
                        best = acc
                v_new[s] = best
                d = abs(best - v[s])
                if d > delta:
                    delta = d
            v = v_new
            if delta <= tol:
                return v, it + 1
        return v, -1

    @numba.njit(cache=True)
    def soft_value_iteration_numba(tau, rsa, gamma, alpha, tol, max_iter):
        n_states, n_actions = rsa.shape
        v = np.zeros(n_states)
        q = np.empty(n_actions)
        for it in range(max_iter):
            v_new = np.empty(n_states)
            delta = 0.0
            for s in range(n_states):
                m = -np.inf
                for a in range(n_actions):
                    acc = rsa[s, a]
                    for sp in range(n_states):
                        acc += gamma * tau[s, a, sp] * v[sp]
                    q[a] = acc
                    if acc > m:
                        m = acc
                z = 0.0
                for a in range(n_actions):
                    z += np.exp((q[a] - m) / alpha)
                v_new[s] = m + alpha * np.log(z)
                d = abs(v_new[s] - v[s])
                if d > delta:
                    delta = d
            v = v_new
            if delta <= tol:
                return v, it + 1
        return v, -1

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    value_iteration_numba = None
    soft_value_iteration_numba = None
    HAVE_NUMBA = False


if HAVE_NUMBA and not _env_forces_numpy():
    BACKEND = "numba"
    value_iteration = value_iteration_numba
    soft_value_iteration = soft_value_iteration_numba
else:
    BACKEND = "numpy"
    value_iteration = value_iteration_numpy
    soft_value_iteration = soft_value_iteration_numpy
