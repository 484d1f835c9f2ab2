"""Exploration: Bayer pipeline (mosaic -> noise -> Malvar) + colored-noise denoise check."""
import numpy as np
from scipy import ndimage
from skimage import data
from scratch_nlm import denoise, psnr

# Malvar-He-Cutler 5x5 kernels (x 1/8)
K_G_AT_RB = np.array([
    [0, 0, -1, 0, 0],
    [0, 0, 2, 0, 0],
    [-1, 2, 4, 2, -1],
    [0, 0, 2, 0, 0],
    [0, 0, -1, 0, 0]], dtype=float) / 8.0
K_CHROMA_H = np.array([  # e.g. R at G in R-row (R neighbors left/right)
    [0, 0, 0.5, 0, 0],
    [0, -1, 0, -1, 0],
    [-1, 4, 5, 4, -1],
    [0, -1, 0, -1, 0],
    [0, 0, 0.5, 0, 0]], dtype=float) / 8.0
K_CHROMA_V = K_CHROMA_H.T.copy()
K_CHROMA_X = np.array([  # R at B / B at R
    [0, 0, -1.5, 0, 0],
    [0, 2, 0, 2, 0],
    [-1.5, 0, 6, 0, -1.5],
    [0, 2, 0, 2, 0],
    [0, 0, -1.5, 0, 0]], dtype=float) / 8.0

PATTERNS = {
    "rggb": np.array([[0, 1], [1, 2]]),
    "grbg": np.array([[1, 0], [2, 1]]),
    "gbrg": np.array([[1, 2], [0, 1]]),
    "bggr": np.array([[2, 1], [1, 0]]),
}


def channel_masks(shape, pattern):
    cfa_ch = PATTERNS[pattern]
    H, W = shape
    yy, xx = np.mgrid[0:H, 0:W]
    ch = cfa_ch[yy % 2, xx % 2]
    return [ch == c for c in range(3)]


def mosaic(img, pattern):
    masks = channel_masks(img.shape[:2], pattern)
    cfa = np.zeros(img.shape[:2])
    for c, m in enumerate(masks):
        cfa[m] = img[..., c][m]
    return cfa


def demosaic_malvar(cfa, pattern):
    H, W = cfa.shape
    mR, mG, mB = channel_masks(cfa.shape, pattern)
    conv = lambda k: ndimage.correlate(cfa, k, mode="mirror")
    gAt = conv(K_G_AT_RB)
    chH = conv(K_CHROMA_H)
    chV = conv(K_CHROMA_V)
    chX = conv(K_CHROMA_X)
    # row types: rows containing R samples vs rows containing B samples
    cfa_ch = PATTERNS[pattern]
    yy, xx = np.mgrid[0:H, 0:W]
    row_has_r = np.isin(cfa_ch[yy % 2, 0 * xx % 2], 0)  # wrong; compute per row below
    # per-pixel row class: does this row contain R (and G) or B (and G)?
    r_rows = (cfa_ch[:, 0] == 0) | (cfa_ch[:, 1] == 0)  # for the two row phases
    row_is_r = r_rows[yy % 2]
    out = np.zeros((H, W, 3))
    # green
    out[..., 1] = np.where(mG, cfa, gAt)
    # red
    out[..., 0] = np.where(mR, cfa,
                  np.where(mG & row_is_r, chH,
                  np.where(mG & ~row_is_r, chV, chX)))
    # blue
    out[..., 2] = np.where(mB, cfa,
                  np.where(mG & ~row_is_r, chH,
                  np.where(mG & row_is_r, chV, chX)))
    return out


def propagated_sigma(pattern):
    # per-channel sqrt(mean over the 4 CFA phase classes of sum of squared coeffs)
    sq = lambda k: float((k * k).sum())
    sG = np.sqrt((1.0 + 1.0 + sq(K_G_AT_RB) + sq(K_G_AT_RB)) / 4.0)
    sR = np.sqrt((1.0 + sq(K_CHROMA_H) + sq(K_CHROMA_V) + sq(K_CHROMA_X)) / 4.0)
    return sR, sG, sR


# --- sanity checks ---
ast = data.astronaut().astype(np.float64) / 255.0
crop = ast[80:208, 170:298]
cfa = mosaic(crop, "rggb")
rt = demosaic_malvar(cfa, "rggb")
print("roundtrip max err (should be moderate):", np.abs(rt - crop).max())
# constant image
const = np.full((16, 16, 3), 0.5)
rc = demosaic_malvar(mosaic(const, "rggb"), "rggb")
print("constant roundtrip max err:", np.abs(rc - 0.5).max())
# linearity + noise propagation MC
rng = np.random.default_rng(3)
noise = rng.normal(0, 1.0, size=(200, 200))
dn = demosaic_malvar(noise, "rggb")
emp = dn.reshape(-1, 3).std(axis=0)
ana = propagated_sigma("rggb")
print("empirical per-channel noise std:", emp, " analytic:", ana)

# --- colored-noise experiment: acceptance 7 ---
sigma255 = 20.0
sigma = sigma255 / 255.0
crops = [ast[80:208, 170:298], ast[300:428, 150:278], ast[30:158, 330:458], ast[0:128, 0:128]]
sR, sG, sB = propagated_sigma("rggb")
sig_eff = sigma * (sR + sG + sB) / 3.0
h = 0.75 * sig_eff
print("sig_eff*255 =", sig_eff * 255)
import time
t0 = time.time()
rng = np.random.default_rng(11)
res = {0.0: [], 0.8: []}
for c in crops:
    cfa = mosaic(c, "rggb")
    noisy = demosaic_malvar(cfa + rng.normal(0, sigma, cfa.shape), "rggb")
    print("  noisy psnr:", psnr(noisy, c))
    for o in res:
        out = denoise(noisy, sig_eff, h, 32, o)
        res[o].append(psnr(out, c))
print("time", time.time() - t0)
a = np.array(res[0.0]); b = np.array(res[0.8])
print("NN  o=0  :", a, a.mean())
print("SNN o=0.8:", b, b.mean())
print("gap:", b.mean() - a.mean())
