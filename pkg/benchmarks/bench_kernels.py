#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the raw hot-path primitives and a full checkout session loop under
each backend. Run from the repository root:

    python benchmarks/bench_kernels.py [--sessions 20000] [--ops 200000]
"""

import argparse
import random
import time

from pap_lab import Channel, SubProtocol, run_session, seed_rng
from pap_lab import kernels
from pap_lab.model import KeyDatabase, ReaderKind, ReaderState, TagState


def timed(fn, n):
    start = time.perf_counter()
    fn(n)
    elapsed = time.perf_counter() - start
    return elapsed, n / elapsed


def bench_primitives(impl, ops):
    r = random.Random(42)
    pairs = [(r.getrandbits(64), r.getrandbits(64)) for _ in range(1000)]
    frame = bytes(r.getrandbits(8) for _ in range(23))   # TagReply-sized frame
    results = {}

    def hash_loop(n):
        fn = impl.auth_hash_u64
        for i in range(n):
            fn(*pairs[i % 1000])
    results["auth_hash"] = timed(hash_loop, ops)

    def crc_loop(n):
        fn = impl.crc16
        for _ in range(n):
            fn(frame)
    results["crc16/23B"] = timed(crc_loop, ops)

    def rng_loop(n):
        fn = impl.splitmix64_next
        state = 1
        for _ in range(n):
            _, state = fn(state)
    results["splitmix64"] = timed(rng_loop, ops)
    return results


def bench_sessions(backend, count):
    kernels.set_backend(backend)
    db = KeyDatabase()
    tag = TagState(1, 7, 0x1234, seed_rng(1))
    db.register(tag)
    checkout = ReaderState(ReaderKind.CHECKOUT, db, seed_rng(2))
    returns = ReaderState(ReaderKind.RETURN, db, seed_rng(3))

    def loop(n):
        for _ in range(n):
            sp = SubProtocol.CHECKOUT if tag.privacy_bit == 0 else SubProtocol.RETURN
            reader = checkout if sp is SubProtocol.CHECKOUT else returns
            verdict, _ = run_session(sp, tag, reader, Channel())
            assert verdict.mutual
    return timed(loop, count)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ops", type=int, default=200_000,
                        help="primitive operations per measurement")
    parser.add_argument("--sessions", type=int, default=20_000,
                        help="full checkout/return sessions per backend")
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("note: compiled extension not built; timing the fallback only")

    prim = {}
    for name in backends:
        kernels.set_backend(name)
        prim[name] = bench_primitives(kernels._impl, args.ops)

    print(f"\nprimitives ({args.ops} ops each)")
    header = f"{'kernel':<12}" + "".join(f"{b:>16}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for kernel in next(iter(prim.values())):
        row = f"{kernel:<12}"
        rates = []
        for b in backends:
            _, rate = prim[b][kernel]
            rates.append(rate)
            row += f"{rate / 1e6:>13.2f} M/s"
        if len(rates) == 2:
            row += f"{rates[1] / rates[0]:>9.1f}x"
        print(row)

    print(f"\nend-to-end sessions ({args.sessions} checkout/return rounds)")
    session_rates = []
    for name in backends:
        elapsed, rate = bench_sessions(name, args.sessions)
        session_rates.append(rate)
        print(f"{name:<12}{elapsed:>8.2f} s{rate:>12.0f} sessions/s")
    if len(session_rates) == 2:
        print(f"{'speedup':<12}{session_rates[1] / session_rates[0]:>20.1f}x")

    kernels.set_backend(backends[-1])


if __name__ == "__main__":
    main()
