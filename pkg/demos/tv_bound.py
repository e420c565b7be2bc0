"""How far the rank law sits from uniform in total variation.

Exact TV by enumeration while n is small, then the event-based lower bound
showing the distance tends to 1.  The separating event: players 1..floor(ln n)
all rank below player n, near-certain under the rank law but only 1/(L+1)
likely under uniform.
"""
from permlab import ModelKind, tv_event_lower_bound, tv_model_vs_uniform


def main() -> None:
    print("exact TV(rank law, uniform) by enumeration")
    for n in range(2, 8):
        print(f"  n={n}: {tv_model_vs_uniform(n, ModelKind.INVERSE_UNFAIR):.6f}")

    print("\nevent lower bound (first L players below player n, L = floor(ln n))")
    print(f"{'n':>12} {'P_rho':>10} {'P_pi':>10} {'bound':>10}")
    for k in range(2, 9):
        n = 10**k
        p_rho, p_pi, diff = tv_event_lower_bound(n)
        print(f"{n:>12} {p_rho:>10.6f} {p_pi:>10.6f} {diff:>10.6f}")


if __name__ == "__main__":
    main()
