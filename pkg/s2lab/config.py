import os
from dotenv import load_dotenv

load_dotenv()

DEFAULT_SEED = int(os.getenv("S2LAB_DEFAULT_SEED", "0"))
DEFAULT_EPSILON = float(os.getenv("S2LAB_DEFAULT_EPSILON", "0.05"))
DEFAULT_JOBS = int(os.getenv("S2LAB_JOBS", "1"))

MAX_DITHER_ATTEMPTS = 10_000
MAX_ENUMERATION = 10**6
VERIFY_ENUMERATION_LIMIT = 10**4
MAX_GRID_CUT_SIDE = 4

# tolerance used when taking ceilings of floating point logarithm ratios
CEIL_TOLERANCE = 1e-9
