#!/usr/bin/env python3
"""Fixture candidate: sleeps far past any sane timeout, never speaks."""
import time

time.sleep(600)
