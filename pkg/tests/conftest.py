import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

LIBRARY_SEED = 0x5EED_CAFE_F00D
