#!/usr/bin/env python3
"""Fixture candidate: prints some noise, then exits nonzero."""
import sys

print("starting up")
sys.exit(3)
