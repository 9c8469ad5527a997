#!/usr/bin/env python3
"""Fixture candidate: exits cleanly but never prints a payload line."""
print("here are some results: 42, 17, 99")
print("goodbye")
