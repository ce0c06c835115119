"""How fast Frobenius (trace, det) pairs fill GL_2(Z/p^n0) for a surjective and a CM curve."""

from tatebound.curve import WeierstrassModel
from tatebound.galois import trace_coverage

CASES = [
    ("13467", [1, 0, 0, 543, 10026], 3),
    ("10082", [1, 0, 1, -141, 624], 2),
    ("y^2 = x^3 - x (CM)", [0, 0, 0, -1, 0], 3),
]


def main():
    for name, coeffs, p in CASES:
        cov = trace_coverage(WeierstrassModel.from_list(coeffs), p)
        print(f"{name} at p = {p}: {cov.observed}/{cov.target} pairs after {cov.primes_used} primes -> {cov.verdict}")
        print("   " + " ".join(f"{u}:{o}" for u, o in cov.history[:12]))


if __name__ == "__main__":
    main()
