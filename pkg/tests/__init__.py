# -*- coding: utf-8 -*-

import os
import sys

# Run the tests against the sources when the package is not installed
SRC_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
if SRC_PATH not in sys.path:
    sys.path.insert(0, SRC_PATH)

# Set to `1` to run the full-size Monte Carlo comparisons
SLOW_TESTS = os.environ.get("PILOT_BEAM_SLOW_TESTS", "") == "1"
