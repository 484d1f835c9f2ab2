"""Exploration: pin down toy-model conventions against reported values."""
import numpy as np
from scipy.special import ndtr

mu, sigma, N, Nn = 1.0, 0.2, 100, 16
ratio = Nn / N


def Phi(x):
    return ndtr(x)


def phi(x):
    return np.exp(-0.5 * x * x) / np.sqrt(2 * np.pi)


def mass_nn(mu_r, d):
    return Phi((mu_r + d - mu) / sigma) - Phi((mu_r - d - mu) / sigma)


def solve_d(mass_fn, mu_r):
    lo = np.zeros_like(mu_r)
    hi = np.full_like(mu_r, 20 * sigma)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        f = mass_fn(mu_r, mid) - ratio
        hi = np.where(f >= 0, mid, hi)
        lo = np.where(f < 0, mid, lo)
    return 0.5 * (lo + hi)


def trunc_moments(a, b):
    # per-sample moments of G(mu, sigma^2) truncated to [a, b]
    al = (a - mu) / sigma
    be = (b - mu) / sigma
    Z = Phi(be) - Phi(al)
    E = mu - sigma * (phi(be) - phi(al)) / Z
    V = sigma**2 * (1 - (be * phi(be) - al * phi(al)) / Z - ((phi(be) - phi(al)) / Z) ** 2)
    return E, V


def nn_curve(mu_r):
    d = solve_d(mass_nn, mu_r)
    E, V = trunc_moments(mu_r - d, mu_r + d)
    return E, V / Nn, d


def mass_snn(o):
    def f(mu_r, d):
        lo_L, hi_L = mu_r - o * sigma - d, mu_r - o * sigma + d
        lo_R, hi_R = mu_r + o * sigma - d, mu_r + o * sigma + d
        overlap = d >= o * sigma
        disjoint = (Phi((hi_L - mu) / sigma) - Phi((lo_L - mu) / sigma)
                    + Phi((hi_R - mu) / sigma) - Phi((lo_R - mu) / sigma))
        union = Phi((hi_R - mu) / sigma) - Phi((lo_L - mu) / sigma)
        return np.where(overlap, union, disjoint)
    return f


def snn_curve(mu_r, o):
    d = solve_d(mass_snn(o), mu_r)
    lo_L, hi_L = mu_r - o * sigma - d, mu_r - o * sigma + d
    lo_R, hi_R = mu_r + o * sigma - d, mu_r + o * sigma + d
    overlap = d >= o * sigma
    # disjoint: mixture of two truncations
    EL, VL = trunc_moments(lo_L, hi_L)
    ER, VR = trunc_moments(lo_R, hi_R)
    PL = Phi((hi_L - mu) / sigma) - Phi((lo_L - mu) / sigma)
    PR = Phi((hi_R - mu) / sigma) - Phi((lo_R - mu) / sigma)
    Emix = (PL * EL + PR * ER) / (PL + PR)
    second = (PL * (EL**2 + VL) + PR * (ER**2 + VR)) / (PL + PR)
    Vmix = second - Emix**2
    # overlap: single truncation on union
    EU, VU = trunc_moments(lo_L, hi_R)
    E = np.where(overlap, EU, Emix)
    V = np.where(overlap, VU, Vmix)
    return E, V / Nn, d


# integration grid (Simpson, 4001 nodes over mu +- 8 sigma)
n_nodes = 4001
z = np.linspace(mu - 8 * sigma, mu + 8 * sigma, n_nodes)
hstep = z[1] - z[0]
w = np.ones(n_nodes)
w[1:-1:2] = 4.0
w[2:-1:2] = 2.0
w *= hstep / 3.0
dens = phi((z - mu) / sigma) / sigma

E_nn, V_nn, d_nn = nn_curve(z)
E_snn, V_snn, d_snn = snn_curve(z, 1.0)

for name, E, V in [("NN", E_nn, V_nn), ("SNN", E_snn, V_snn)]:
    bias2 = np.sum(w * (E - mu) ** 2 * dens)
    var = np.sum(w * V * dens)
    print(f"{name}: raw Eq8      bias_sq={bias2:.6f} var={var:.6f} mse={bias2+var:.6f}")
    print(f"{name}: /sigma       bias_sq={bias2/sigma:.6f} var={var/sigma:.6f} mse={(bias2+var)/sigma:.6f}")
    # unweighted over +-6 sigma
    m6 = np.abs(z - mu) <= 6 * sigma
    b6 = np.trapezoid(((E - mu) ** 2)[m6], z[m6])
    v6 = np.trapezoid(V[m6], z[m6])
    print(f"{name}: unweighted6s bias_sq={b6:.6f} var={v6:.6f}")
    # /sigma^2
    print(f"{name}: /sigma^2     bias_sq={bias2/sigma**2:.6f} var={var/sigma**2:.6f}")

# sanity: d at mu_r = mu for NN should be ~0.2019*sigma*... check
print("d_nn(mu) =", nn_curve(np.array([mu]))[2][0], "expect ~", 0.2019 * sigma)
print("bias at mu_r=mu+sigma:", nn_curve(np.array([mu + sigma]))[0][0] - mu)
print("saturation check E-mu at mu+5s, mu+7s:",
      nn_curve(np.array([mu + 5 * sigma]))[0][0] - mu,
      nn_curve(np.array([mu + 7 * sigma]))[0][0] - mu)
