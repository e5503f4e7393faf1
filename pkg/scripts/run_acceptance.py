"""Run the acceptance suite and print one pass/fail line per criterion.

Same as ``pytest tests/test_acceptance.py`` but without pytest's own output.
"""
import runpy
import sys
from pathlib import Path

tests = Path(__file__).resolve().parent.parent / "tests"
sys.path.insert(0, str(tests))
runpy.run_path(str(tests / "test_acceptance.py"), run_name="__main__")
