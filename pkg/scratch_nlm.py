"""Exploration: vectorized NLM engine prototype; check PSNR orderings for acceptance 6."""
import time
import numpy as np
from skimage import data


def pad_mirror(img, margin):
    if margin == 0:
        return img.copy()
    pw = [(margin, margin), (margin, margin)] + [(0, 0)] * (img.ndim - 2)
    return np.pad(img, pw, mode="reflect")


def denoise(img, sigma, h, n_neighbors, offset, patch_side=3, search_side=21):
    hp = (patch_side - 1) // 2
    hs = (search_side - 1) // 2
    pad = hp + hs
    H, W = img.shape[:2]
    n_off = search_side * search_side
    P = pad_mirror(img, pad)
    multi = img.ndim == 3
    p_el = patch_side * patch_side * (3 if multi else 1)

    # distance stack (n_off, H, W)
    D = np.empty((n_off, H, W))
    k = 0
    r0, r1 = pad - hp, pad + H + hp
    c0, c1 = pad - hp, pad + W + hp
    for dy in range(-hs, hs + 1):
        for dx in range(-hs, hs + 1):
            a = P[r0:r1, c0:c1]
            b = P[r0 + dy:r1 + dy, c0 + dx:c1 + dx]
            d = a - b
            d = d * d
            if multi:
                d = d[..., 0] + d[..., 1] + d[..., 2]
            acc = d[0:H, 0:W].copy()
            first = True
            for ey in range(patch_side):
                for ex in range(patch_side):
                    if first:
                        first = False
                        continue
                    acc += d[ey:ey + H, ex:ex + W]
            np.divide(acc, p_el, out=D[k])
            k += 1

    two_s2 = 2.0 * sigma * sigma
    keys = D if offset == 0.0 else np.abs(D - offset * two_s2)
    order = np.argsort(keys, axis=0, kind="stable")[:n_neighbors]
    d_sel = np.take_along_axis(D, order, axis=0)
    w_sel = np.exp(-np.maximum(0.0, d_sel - two_s2) / (h * h))
    Wf = np.zeros_like(D)
    np.put_along_axis(Wf, order, w_sel, axis=0)
    wsum = Wf[0].copy()
    for k in range(1, n_off):
        wsum += Wf[k]
    Wf /= wsum  # normalized per-center weights

    # aggregation: out[q] = sum_k I_pad[q+u_k] * B_k[q] / cover[q]
    # B_k[q] = sum_e Wf_k[q - e], e in patch offsets
    shape = (H, W, 3) if multi else (H, W)
    num = np.zeros(shape)
    z = np.zeros((H + 2 * hp, W + 2 * hp))
    Bk = np.empty((H, W))
    k = 0
    for dy in range(-hs, hs + 1):
        for dx in range(-hs, hs + 1):
            z[hp:hp + H, hp:hp + W] = Wf[k]
            first = True
            for ey in range(patch_side):
                for ex in range(patch_side):
                    sl = z[ey:ey + H, ex:ex + W]
                    if first:
                        Bk[...] = sl
                        first = False
                    else:
                        Bk += sl
            shifted = P[pad + dy:pad + dy + H, pad + dx:pad + dx + W]
            if multi:
                num += shifted * Bk[..., None]
            else:
                num += shifted * Bk
            k += 1
    ones = np.zeros((H + 2 * hp, W + 2 * hp))
    ones[hp:hp + H, hp:hp + W] = 1.0
    cover = np.zeros((H, W))
    for ey in range(patch_side):
        for ex in range(patch_side):
            cover += ones[ey:ey + H, ex:ex + W]
    if multi:
        cover = cover[..., None]
    return num / cover


def psnr(a, b):
    mse = np.mean((a - b) ** 2)
    return 10 * np.log10(1.0 / mse)


crops = []
cam = data.camera().astype(np.float64) / 255.0
moon = data.moon().astype(np.float64) / 255.0
coins = data.coins().astype(np.float64) / 255.0
ast = data.astronaut().astype(np.float64) / 255.0
luma = 0.299 * ast[..., 0] + 0.587 * ast[..., 1] + 0.114 * ast[..., 2]
for src, spots in [(cam, [(64, 64), (200, 256), (320, 128), (96, 320)]),
                   (moon, [(128, 128), (300, 250)]),
                   (coins, [(60, 60), (150, 200)]),
                   (luma, [(30, 180), (256, 256)])]:
    for (y, x) in spots:
        crops.append(src[y:y + 128, x:x + 128].copy())
print(f"{len(crops)} crops")

sigma = 20.0 / 255.0
h = 0.75 * sigma
rng = np.random.default_rng(7)
results = {0.0: [], 0.8: [], 1.0: []}
t0 = time.time()
for i, c in enumerate(crops):
    noisy = c + rng.normal(0.0, sigma, size=c.shape)
    for o in results:
        out = denoise(noisy, sigma, h, 16, o)
        results[o].append(psnr(out, c))
t1 = time.time()
print(f"total time {t1-t0:.1f}s for {len(crops)*3} runs")
for o, vals in results.items():
    print(f"o={o}: mean PSNR {np.mean(vals):.3f}  per-crop {[f'{v:.2f}' for v in vals]}")
print("gap 1.0-0.8:", np.mean(results[1.0]) - np.mean(results[0.8]))
print("gap 0.8-0.0:", np.mean(results[0.8]) - np.mean(results[0.0]))
