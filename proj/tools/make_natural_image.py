"""Regenerates data/coffee_720x544.pgm from scikit-image's public-domain `coffee` sample."""
import pathlib

import numpy as np
from PIL import Image
from skimage import data

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "coffee_720x544.pgm"

rgb = Image.fromarray(data.coffee())
gray = rgb.resize((720, 544), Image.Resampling.LANCZOS).convert("L")
gray.save(OUT)
print(OUT, np.asarray(gray).shape)
