from __future__ import annotations

import sys
from pathlib import Path

# Make ``sw_lift`` importable from a source checkout.
SRC_PATH = Path(__file__).resolve().parents[1] / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))
