"""Compare the compiled and NumPy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case is timed on every available backend (best of ``--repeat`` runs)
and the results are checked for agreement before timings are reported.
"""

import argparse
import time

import numpy as np

from switchsynth import GaussianBelief, JumpSystem, SynthesisConfig, _kernels, synthesize_receding_horizon

EXAMPLE1_MODES = [
    [[1.01, -0.17], [0.32, -0.48]],
    [[0.06, 0.80], [0.01, -0.77]],
    [[0.72, 0.48], [0.0, 0.55]],
    [[-0.33, -0.65], [-0.46, 0.69]],
    [[-0.13, 0.12], [-1.33, -1.05]],
]


def cases():
    system = JumpSystem(EXAMPLE1_MODES)
    M0 = GaussianBelief([5.0, 5.0], 2.25 * np.eye(2)).second_moment
    modes = system.stacked
    rng = np.random.default_rng(0)
    seq = rng.integers(0, 5, 10_000).astype(np.intp)

    rng6 = np.random.default_rng(1)
    raw = rng6.uniform(-1, 1, (2, 6, 6))
    modes6 = np.stack([0.9 * A / max(abs(np.linalg.eigvals(A))) for A in raw])
    L = rng6.normal(size=(6, 6))
    M6 = L @ L.T

    return [
        ("exhaustive_search ex1, 8 steps (5^8 leaves)", lambda: _kernels.exhaustive_search(M0, modes, 8)),
        ("exhaustive_search n=6, 2 modes, 16 steps", lambda: _kernels.exhaustive_search(M6, modes6, 16)),
        ("horizon_costs ex1, T=10", lambda: _kernels.horizon_costs(M0, modes, 10)),
        ("sequence_traces ex1, 10000 steps", lambda: _kernels.sequence_traces(M0, modes, seq)),
        ("propagate_moment n=6, 1000 steps", lambda: _kernels.propagate_moment(M6, modes6[0], 1000)),
        ("receding horizon ex1, T=5, 600 steps", lambda: synthesize_receding_horizon(
            system, GaussianBelief([5.0, 5.0], 2.25 * np.eye(2)),
            SynthesisConfig(horizon_T=5, total_steps=600)).switched_area),
    ]


def best_time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def _flatten(out):
    parts = out if isinstance(out, tuple) else (out,)
    return np.concatenate([np.ravel(np.asarray(p, dtype=float)) for p in parts])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = _kernels.available_backends()
    original = _kernels.BACKEND
    print(f"backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled extension not built; only the NumPy fallback is timed")
    header = f"{'case':45s}" + "".join(f"{b:>12s}" for b in backends) + ("    speedup" if len(backends) > 1 else "")
    print(header)
    try:
        for name, fn in cases():
            times, outs = [], []
            for b in backends:
                _kernels.set_backend(b)
                t, out = best_time(fn, args.repeat)
                times.append(t)
                outs.append(_flatten(out))
            for other in outs[1:]:
                np.testing.assert_allclose(other, outs[0], rtol=1e-9, atol=1e-12)
            line = f"{name:45s}" + "".join(f"{t * 1e3:10.3f}ms" for t in times)
            if len(times) > 1:
                line += f"  {times[backends.index('python')] / times[backends.index('cython')]:8.1f}x"
            print(line)
    finally:
        _kernels.set_backend(original)


if __name__ == "__main__":
    main()
