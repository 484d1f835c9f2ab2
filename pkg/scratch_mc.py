"""Exploration: real-process MC vs analytic toy model."""
import numpy as np
from scipy.special import ndtr, ndtri

mu, sigma, N, Nn = 1.0, 0.2, 100, 16
ratio = Nn / N
rng = np.random.default_rng(12345)


def solve_d_nn(mu_r):
    mu_r = np.atleast_1d(np.asarray(mu_r, dtype=float))
    lo = np.zeros_like(mu_r)
    hi = np.full_like(mu_r, 20 * sigma)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        f = (ndtr((mu_r + mid - mu) / sigma) - ndtr((mu_r - mid - mu) / sigma)) - ratio
        hi = np.where(f >= 0, mid, hi)
        lo = np.where(f < 0, mid, lo)
    return 0.5 * (lo + hi)


def phi(x):
    return np.exp(-0.5 * x * x) / np.sqrt(2 * np.pi)


def trunc_moments(a, b):
    al = (a - mu) / sigma
    be = (b - mu) / sigma
    Z = ndtr(be) - ndtr(al)
    E = mu - sigma * (phi(be) - phi(al)) / Z
    V = sigma**2 * (1 - (be * phi(be) - al * phi(al)) / Z - ((phi(be) - phi(al)) / Z) ** 2)
    return E, V


# --- conditional: real order-statistics process at fixed mu_r ---
def mc_conditional_real(mu_r, trials=10**6, batch=200_000):
    means = []
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        x = rng.normal(mu, sigma, size=(b, N))
        key = np.abs(x - mu_r)
        idx = np.argpartition(key, Nn - 1, axis=1)[:, :Nn]
        sel = np.take_along_axis(x, idx, axis=1)
        means.append(sel.mean(axis=1))
        done += b
    m = np.concatenate(means)
    return m.mean(), m.var(), m.std() / np.sqrt(len(m))


# --- conditional: model-distribution sampler (truncated gaussian) ---
def mc_conditional_model(mu_r, trials=10**6, batch=200_000):
    d = solve_d_nn(mu_r)[0]
    a, b = mu_r - d, mu_r + d
    pa, pb = ndtr((a - mu) / sigma), ndtr((b - mu) / sigma)
    means = []
    done = 0
    while done < trials:
        nb = min(batch, trials - done)
        u = rng.uniform(pa, pb, size=(nb, Nn))
        x = mu + sigma * ndtri(u)
        means.append(x.mean(axis=1))
        done += nb
    m = np.concatenate(means)
    return m.mean(), m.var(), m.std() / np.sqrt(len(m))


print("conditional moments, NN: analytic vs real-process vs model-sampler")
for t in [0.0, 1.0, 2.0]:
    mu_r = mu + t * sigma
    d = solve_d_nn(mu_r)[0]
    E_a, V_a = trunc_moments(mu_r - d, mu_r + d)
    V_a /= Nn
    E_r, V_r, se_r = mc_conditional_real(mu_r, 10**6)
    E_m, V_m, se_m = mc_conditional_model(mu_r, 10**6)
    print(f" mu_r=mu+{t}s: E_a={E_a:.6f}  E_real={E_r:.6f} (dev {abs(E_a-E_r)/se_r:6.1f} SE)"
          f"  E_model={E_m:.6f} (dev {abs(E_a-E_m)/se_m:4.1f} SE)")
    print(f"            V_a={V_a:.3e} V_real={V_r:.3e} ({abs(V_a-V_r)/V_a:6.1%})"
          f" V_model={V_m:.3e} ({abs(V_a-V_m)/V_a:6.1%})")

# --- integrated: real process, both strategies ---
def mc_integrated(strategy, o=1.0, trials=10**6, batch=100_000):
    mse_acc = 0.0
    bias_acc = 0.0
    n = 0
    while n < trials:
        b = min(batch, trials - n)
        mu_r = rng.normal(mu, sigma, size=(b, 1))
        est = []
        for _ in range(2):
            others = rng.normal(mu, sigma, size=(b, N - 1))
            pool = np.concatenate([mu_r, others], axis=1)
            if strategy == "nn":
                key = np.abs(pool - mu_r)
            else:
                key = np.abs(np.abs(pool - mu_r) - o * sigma)
            idx = np.argpartition(key, Nn - 1, axis=1)[:, :Nn]
            est.append(np.take_along_axis(pool, idx, axis=1).mean(axis=1))
        e1, e2 = est
        mse_acc += (((e1 - mu) ** 2).sum() + ((e2 - mu) ** 2).sum()) / 2
        bias_acc += ((e1 - mu) * (e2 - mu)).sum()
        n += b
    mse = mse_acc / n
    bsq = bias_acc / n
    return bsq / ratio, (mse - bsq) / ratio, mse / ratio


analytic = {"nn": (0.1799, 0.00068, 0.1806), "snn": (0.0399, 0.00957, 0.0495)}
for strat in ["nn", "snn"]:
    b, v, m = mc_integrated(strat)
    print(f"{strat}: MC real process bias_sq={b:.5f} var={v:.5f} mse={m:.5f}"
          f"   analytic mse={analytic[strat][2]}  rel dev={(m-analytic[strat][2])/analytic[strat][2]:+.2%}")
