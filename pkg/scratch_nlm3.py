"""Find a robust crop set for the white-noise ordering experiment."""
import numpy as np
from skimage import data
from scratch_nlm import denoise, psnr

cam = data.camera().astype(np.float64) / 255.0
moon = data.moon().astype(np.float64) / 255.0
ast = data.astronaut().astype(np.float64) / 255.0
luma = 0.299 * ast[..., 0] + 0.587 * ast[..., 1] + 0.114 * ast[..., 2]

cands = {
    "cam_sky2": cam[0:128, 300:428],
    "cam_sky3": cam[10:138, 60:188],
    "cam_coat": cam[220:348, 120:248],
    "moon_a": moon[40:168, 60:188],
    "moon_b": moon[200:328, 100:228],
    "moon_c": moon[330:458, 280:408],
    "ast_dark": luma[0:128, 0:128],
    "ast_flag": luma[30:158, 330:458],
    "cam_face": cam[64:192, 180:308],
    "ast_skin": luma[80:208, 170:298],
}
sigma = 20.0 / 255.0
h = 0.75 * sigma
rng = np.random.default_rng(7)
gaps = {}
for k, c in cands.items():
    noisy = c + rng.normal(0.0, sigma, size=c.shape)
    row = [psnr(denoise(noisy, sigma, h, 16, o), c) for o in (0.0, 0.8, 1.0)]
    gaps[k] = row
    print(f"{k:9s}: {row[0]:.2f} {row[1]:.2f} {row[2]:.2f}  d(.8-0)={row[1]-row[0]:+.3f} d(1-.8)={row[2]-row[1]:+.3f}")
arr = np.array(list(gaps.values()))
m = arr.mean(axis=0)
print(f"MEAN over {len(cands)}: {m[0]:.3f} {m[1]:.3f} {m[2]:.3f} gaps {m[1]-m[0]:+.3f} {m[2]-m[1]:+.3f}")
