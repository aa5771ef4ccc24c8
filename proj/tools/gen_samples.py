#!/usr/bin/env python3
"""Writes the bundled AIGER samples into samples/.

    python3 tools/gen_samples.py [outdir]
"""

import random
import sys
from pathlib import Path


class Aig:
    def __init__(self, num_inputs, num_latches):
        self.num_inputs = num_inputs
        self.num_latches = num_latches
        self.var = num_inputs + num_latches
        self.gates = []
        self.nexts = [0] * num_latches
        self.resets = [0] * num_latches
        self.bad = []
        self.symbols = []

    def input(self, i):
        return 2 * (i + 1)

    def latch(self, i):
        return 2 * (self.num_inputs + 1 + i)

    def land(self, a, b):
        if a == 0 or b == 0:
            return 0
        if a == 1:
            return b
        if b == 1:
            return a
        self.var += 1
        lhs = 2 * self.var
        self.gates.append((lhs, max(a, b), min(a, b)))
        return lhs

    def lor(self, a, b):
        return self.land(a ^ 1, b ^ 1) ^ 1

    def lxor(self, a, b):
        return self.lor(self.land(a, b ^ 1), self.land(a ^ 1, b))

    def conj(self, lits):
        out = 1
        for l in lits:
            out = self.land(out, l)
        return out

    def ascii(self):
        lines = [f"aag {self.var} {self.num_inputs} {self.num_latches} 0 {len(self.gates)} {len(self.bad)}"]
        lines += [str(self.input(i)) for i in range(self.num_inputs)]
        for i in range(self.num_latches):
            reset = "" if self.resets[i] == 0 else f" {self.resets[i] if self.resets[i] == 1 else self.latch(i)}"
            lines.append(f"{self.latch(i)} {self.nexts[i]}{reset}")
        lines += [str(b) for b in self.bad]
        lines += [f"{a} {b} {c}" for a, b, c in self.gates]
        lines += self.symbols
        return "\n".join(lines) + "\n"

    def binary(self):
        def delta(x):
            out = bytearray()
            while x >= 0x80:
                out.append((x & 0x7F) | 0x80)
                x >>= 7
            out.append(x)
            return bytes(out)

        head = f"aig {self.var} {self.num_inputs} {self.num_latches} 0 {len(self.gates)} {len(self.bad)}\n"
        body = bytearray(head.encode())
        for i in range(self.num_latches):
            reset = "" if self.resets[i] == 0 else f" {self.resets[i] if self.resets[i] == 1 else self.latch(i)}"
            body += f"{self.nexts[i]}{reset}\n".encode()
        for b in self.bad:
            body += f"{b}\n".encode()
        for lhs, r0, r1 in self.gates:
            body += delta(lhs - r0) + delta(r0 - r1)
        for s in self.symbols:
            body += (s + "\n").encode()
        return bytes(body)


def toy7_uninit():
    # the seven-latch example with y0 and y1 left free, so y0 = y1 = 0 is
    # reachable and z drops two steps later
    m = Aig(0, 7)
    x0, x1, x, y0, y1, y, z = (m.latch(i) for i in range(7))
    m.nexts = [
        x0 ^ 1,
        x1 ^ 1,
        m.lor(x0, x1),
        m.land(y0 ^ 1, x),
        m.land(y1 ^ 1, x),
        m.lor(y0, y1),
        m.land(y, x),
    ]
    m.resets = [1, 0, 1, 2, 2, 1, 1]
    m.bad = [z ^ 1]
    m.symbols = [f"l{i} {n}" for i, n in enumerate(["x0", "x1", "x", "y0", "y1", "y", "z"])]
    return m


def shift_equivalence(n):
    # two n-bit shift registers fed by the same input never disagree
    m = Aig(1, 2 * n)
    a = [m.latch(i) for i in range(n)]
    b = [m.latch(n + i) for i in range(n)]
    m.nexts = [m.input(0)] + a[:-1] + [m.input(0)] + b[:-1]
    m.bad = [m.lxor(a[-1], b[-1])]
    return m


def counter_with_enable(bits, target):
    # binary counter that advances when `en` is high; reaches target
    m = Aig(1, bits)
    q = [m.latch(i) for i in range(bits)]
    carry = m.input(0)
    for i in range(bits):
        m.nexts[i] = m.lxor(q[i], carry)
        carry = m.land(carry, q[i])
    m.bad = [m.conj([q[i] if (target >> i) & 1 else q[i] ^ 1 for i in range(bits)])]
    m.symbols = ["i0 en"]
    return m


def modulo_counter_with_noise(noise, seed):
    # 4-bit counter wrapping at 9 never shows 12; `noise` unrelated latches
    # run a random feedback register that cone-of-influence reduction drops
    rng = random.Random(seed)
    m = Aig(2, 4 + noise)
    q = [m.latch(i) for i in range(4)]
    nine = m.conj([q[0], q[1] ^ 1, q[2] ^ 1, q[3]])
    carry = 1
    for i in range(4):
        m.nexts[i] = m.land(m.lxor(q[i], carry), nine ^ 1)
        carry = m.land(carry, q[i])
    r = [m.latch(4 + i) for i in range(noise)]
    for i in range(noise):
        taps = rng.sample(range(noise), 3)
        m.nexts[4 + i] = m.lxor(m.lxor(r[taps[0]], r[taps[1]]), m.land(r[taps[2]], m.input(1)))
        m.resets[4 + i] = rng.randint(0, 1)
    m.bad = [m.conj([q[0] ^ 1, q[1] ^ 1, q[2], q[3]])]
    return m


def token_ring_arbiter(n):
    # one-hot token passed around n cells; a grant needs request and token,
    # so two grants never coincide
    m = Aig(n, n)
    tok = [m.latch(i) for i in range(n)]
    m.nexts = [tok[i - 1] for i in range(n)]
    m.resets = [1] + [0] * (n - 1)
    grants = [m.land(m.input(i), tok[i]) for i in range(n)]
    clash = 0
    for i in range(n):
        for j in range(i + 1, n):
            clash = m.lor(clash, m.land(grants[i], grants[j]))
    m.bad = [clash]
    m.symbols = [f"i{i} req{i}" for i in range(n)]
    return m


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "samples"
    out.mkdir(parents=True, exist_ok=True)
    (out / "toy7_uninit.aag").write_text(toy7_uninit().ascii())
    (out / "shift_eq200.aag").write_text(shift_equivalence(100).ascii())
    (out / "counter_en.aag").write_text(counter_with_enable(6, 40).ascii())
    (out / "modcount_noise.aig").write_bytes(modulo_counter_with_noise(150, 7).binary())
    (out / "arbiter8.aig").write_bytes(token_ring_arbiter(8).binary())


if __name__ == "__main__":
    main()
