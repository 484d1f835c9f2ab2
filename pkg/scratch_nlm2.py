"""Tune crop selection / h for the white-noise ordering experiment."""
import time
import numpy as np
from skimage import data
from scratch_nlm import denoise, psnr

cam = data.camera().astype(np.float64) / 255.0
moon = data.moon().astype(np.float64) / 255.0
ast = data.astronaut().astype(np.float64) / 255.0
luma = 0.299 * ast[..., 0] + 0.587 * ast[..., 1] + 0.114 * ast[..., 2]
text = data.text().astype(np.float64) / 255.0
page = data.page().astype(np.float64) / 255.0

# candidate crops: mix of flat-ish and structured regions
cands = {
    "cam_sky": cam[20:148, 150:278],        # sky + tower tip
    "cam_coat": cam[220:348, 120:248],      # dark coat, flat
    "cam_face": cam[64:192, 180:308],
    "cam_grass": cam[330:458, 300:428],
    "moon_disc": moon[128:256, 128:256],
    "moon_edge": moon[300:428, 250:378],
    "ast_skin": luma[80:208, 170:298],      # face
    "ast_flag": luma[30:158, 330:458],
    "ast_suit": luma[300:428, 150:278],
    "page_txt": page[30:158, 60:188],
}
sigma = 20.0 / 255.0
rng = np.random.default_rng(7)
noisy = {k: v + rng.normal(0.0, sigma, size=v.shape) for k, v in cands.items()}

for h_mult in [0.55, 0.75, 1.0]:
    h = h_mult * sigma
    print(f"--- h = {h_mult} sigma ---")
    per = {}
    for k in cands:
        row = []
        for o in [0.0, 0.8, 1.0]:
            out = denoise(noisy[k], sigma, h, 16, o)
            row.append(psnr(out, cands[k]))
        per[k] = row
        print(f"  {k:10s}: o=0 {row[0]:.2f}  o=.8 {row[1]:.2f}  o=1 {row[2]:.2f}   d(1-.8)={row[2]-row[1]:+.3f}")
    arr = np.array(list(per.values()))
    m = arr.mean(axis=0)
    print(f"  MEAN: {m[0]:.3f} {m[1]:.3f} {m[2]:.3f}   gaps: {m[1]-m[0]:+.3f}, {m[2]-m[1]:+.3f}")
