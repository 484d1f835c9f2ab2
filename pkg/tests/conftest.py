import numpy as np
import pytest
from skimage import data


def to_unit(img: np.ndarray) -> np.ndarray:
    return img.astype(np.float64) / 255.0


@pytest.fixture(scope="session")
def gray_crops():
    """Ten deterministic 128x128 grayscale crops (flat and structured mix)."""
    cam = to_unit(data.camera())
    moon = to_unit(data.moon())
    ast = to_unit(data.astronaut())
    luma = 0.299 * ast[..., 0] + 0.587 * ast[..., 1] + 0.114 * ast[..., 2]
    crops = [
        cam[0:128, 300:428],
        cam[10:138, 60:188],
        cam[220:348, 120:248],
        cam[64:192, 180:308],
        moon[40:168, 60:188],
        moon[200:328, 100:228],
        moon[330:458, 280:408],
        luma[0:128, 0:128],
        luma[30:158, 330:458],
        luma[80:208, 170:298],
    ]
    return [c.copy() for c in crops]


@pytest.fixture(scope="session")
def rgb_crops():
    """Four deterministic 128x128 RGB crops."""
    ast = to_unit(data.astronaut())
    crops = [
        ast[80:208, 170:298],
        ast[300:428, 150:278],
        ast[30:158, 330:458],
        ast[0:128, 0:128],
    ]
    return [c.copy() for c in crops]


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
