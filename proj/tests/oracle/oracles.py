"""Independent oracle for the frozen values in the unit tests.

Plain enumeration in numpy, sharing no code with the C++ library.
Run: python3 tests/oracle/oracles.py
"""
import itertools
import math

import numpy as np

T = np.array([[0.7, 0.3], [0.4, 0.6]])
PI = np.array([4 / 7, 3 / 7])


def nu_markov(block):
    p = PI[block[0]]
    for a, b in zip(block, block[1:]):
        p *= T[a, b]
    return p


def block_kl(q_words, q_probs, rho, nu, n):
    h = 0.0
    for idx in itertools.product(range(len(q_words)), repeat=n):
        q = math.prod(q_probs[i] for i in idx)
        letters = [l for i in idx for l in q_words[i]]
        p = math.prod(rho.get(len(q_words[i]), 0.0) for i in idx) * nu(letters)
        h += q * math.log(q / p)
    return h


def psi_block(q_words, q_probs, k):
    # Psi_Q(b) = (1/m) E sum_{j < |Y_1|} 1{letters j..j+k-1 of kappa(Y) = b}, i.i.d. words
    m = sum(p * len(w) for w, p in zip(q_words, q_probs))
    need = k + max(len(w) for w in q_words)
    out = {}

    def rec(prefix, prob, first):
        if len(prefix) >= need:
            for j in range(first):
                b = tuple(prefix[j:j + k])
                out[b] = out.get(b, 0.0) + prob / m
            return
        for w, p in zip(q_words, q_probs):
            rec(prefix + list(w), prob * p, first if first else len(w))

    rec([], 1.0, 0)
    return out


def main():
    print("cylinder (0,1,1) markov:", repr(nu_markov([0, 1, 1])))
    words = [(0,), (1, 1), (0, 1)]
    probs = [0.5, 0.3, 0.2]
    rho = {1: 0.5, 2: 0.3, 3: 0.2}
    for n in range(1, 5):
        print(f"h_{n} markov nu, iid Q:", repr(block_kl(words, probs, rho, nu_markov, n)))
    for b, v in sorted(psi_block([(0,), (1, 1)], [0.5, 0.5], 3).items()):
        print("psi3", b, repr(v))
    h_row = lambda r: -sum(x * math.log(x) for x in r)
    print("word chain entropy:", repr(PI[0] * h_row(T[0]) + PI[1] * h_row(T[1])))
    # reference word law entropy for markov nu, rho on 1..3: sum_c pi_c H(rho(|w|) nu(w|c))
    h = 0.0
    for c in (0, 1):
        hc = 0.0
        for ell, r in rho.items():
            for w in itertools.product((0, 1), repeat=ell):
                p = r * math.prod(T[a, b] for a, b in zip((c,) + w, w))
                hc -= p * math.log(p)
        h += PI[c] * hc
    print("reference entropy markov nu:", repr(h))
    print("scgf iid 1{|w|=1}:", repr(math.log((math.e + 1) / 2)))
    print("recurrence iid lhs series:", repr(sum(2.0 ** -g * math.log(g) for g in range(1, 200))))


if __name__ == "__main__":
    main()
