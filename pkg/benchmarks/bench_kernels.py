"""Compiled core versus numpy fallback on the four hot kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on inputs of the size used by the reference scenarios; the
table reports the best of ``repeat`` wall times and the speed-up.
"""

import argparse
import timeit

import numpy as np

from gaussentropy._kernels import _fallback
from gaussentropy.boson_gaussian import two_mode_covariance, two_mode_eps_max
from gaussentropy.fermion_exact import sector_states
from gaussentropy.fock_probability import hermite_workspace

try:
    from gaussentropy._kernels import _core
except ImportError:
    _core = None


def cases(rng):
    eps = 0.9 * two_mode_eps_max(3.0, 3.0, "squeezed")
    ws = hermite_workspace(two_mode_covariance(3.0, 3.0, eps, -eps))
    yield "hermite_diagonal (2 modes, cutoff 30)", "hermite_diagonal", (ws.R, ws.Ry, 30)

    n = 11
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = h + h.conj().T
    yield "sector_hamiltonian (11 modes, N=5)", "sector_hamiltonian", (h, sector_states(n, 5), n)

    d = np.sort(rng.uniform(-0.5, 0.5, 800))
    w2 = np.full(800, 0.02 / (2 * np.pi * 800))
    yield "secular_roots (800 poles)", "secular_roots", (d, w2, 0.0, 1)
    o, u = _fallback.secular_roots(d, w2, 0.0, 1)
    yield "arrowhead_vectors (800 poles)", "arrowhead_vectors", (d, o, u)


def best(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(7)
    print(f"{'kernel':42s} {'fallback [s]':>13s} {'compiled [s]':>13s} {'speed-up':>9s}")
    for label, name, inputs in cases(rng):
        t_py = best(getattr(_fallback, name), inputs, args.repeat)
        if _core is None:
            print(f"{label:42s} {t_py:13.4g} {'n/a':>13s} {'n/a':>9s}")
            continue
        t_c = best(getattr(_core, name), inputs, args.repeat)
        print(f"{label:42s} {t_py:13.4g} {t_c:13.4g} {t_py / t_c:9.1f}")


if __name__ == "__main__":
    main()
