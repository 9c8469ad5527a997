#!/usr/bin/env python3
"""Fixture candidate honoring the QUICK contract: a small but valid packing
under QUICK=1, the full construction otherwise."""
import json
import os
import time

if os.environ.get("QUICK") == "1":
    circles = [[(i + 0.5) / 26, 0.5, 0.4 / 26] for i in range(26)]
else:
    time.sleep(1.0)  # stands in for the expensive full construction
    circles = [[(i % 6 + 0.5) / 6, (i // 6 + 0.5) / 5, 0.075] for i in range(26)]
print(json.dumps({"circles": circles}))
