#!/usr/bin/env python3
"""Run the acceptance suite with its per-criterion pass/fail lines visible."""

import sys

import pytest

if __name__ == "__main__":
    sys.exit(pytest.main(["tests/test_acceptance.py", "-v", "-s"] + sys.argv[1:]))
