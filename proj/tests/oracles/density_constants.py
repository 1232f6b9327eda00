# Independent reference values for density_constants (n = 1).
# Smoothstep built from its defining conditions, C^k norm from exact extrema.
import math
import sympy as sp

K, n, k, eps, c = 1.0, 1, 3, 0.5, 1.0

u = sp.symbols("u")
deg = 2 * k + 1
a = sp.symbols(f"a0:{deg + 1}")
S = sum(a[i] * u**i for i in range(deg + 1))
eqs = [S.subs(u, 0), S.subs(u, 1) - 1]
for j in range(1, k + 1):
    eqs += [sp.diff(S, u, j).subs(u, 0), sp.diff(S, u, j).subs(u, 1)]
S = sp.expand(S.subs(sp.solve(eqs, a)))

Rk = K / math.factorial(k - 1)
total = sum(K**i * Rk ** ((n - i) / k) for i in range(n + 1))
terms = [eps, 1.0, Rk * eps**k / K**k, (eps**n / (2**n * c * total)) ** (k / (k - 1))]
r = 0.5 * min(terms)
gamma = r ** (1 - 1 / k)
d = gamma**2 / (4 * K**2)
N = math.ceil((1 + 2 / d) ** n)
eta1 = min(r, gamma**2 / (8 * (K + eps)))

C1 = 0.0
for j in range(1, k + 1):
    dj = sp.diff(S, u, j)
    cands = [sp.Integer(0), sp.Integer(1)] + [x for x in sp.real_roots(sp.Poly(sp.diff(dj, u), u)) if 0 <= x <= 1]
    m = max(abs(float(dj.subs(u, x))) for x in cands)
    C1 = max(C1, m * (4 / d) ** j)

entropy = c * total / r ** (n - 1 + 1 / k)
print(f"terms {terms}")
print(f"r {r!r}\ngamma {gamma!r}\nd {d!r}\nN {N}\neta1 {eta1!r}")
print(f"C1 {C1!r}\npsi2 {eta1 / (4 * N * C1)!r}\npsi3_cap {gamma**2 / (8 * (K + eps) ** 2)!r}")
print(f"entropy {entropy!r}\nmeasure {entropy * (2 * r / eps) ** n!r}")
print("smoothstep", S)
# entropy example: K=2, n=2, k=3, r=0.1, c=1
R = 2 / 2
print("entropy_example", sum(2**i * R ** ((2 - i) / 3) for i in range(3)) / 0.1 ** (1 + 1 / 3))
