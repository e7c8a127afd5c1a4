"""
Unit and regression test for the chainlock package.
"""

# Import package, test suite, and other packages as needed
import chainlock
import pytest
import sys

def test_chainlock_imported():
    """Sample test, will always pass so long as import statement worked"""
    assert "chainlock" in sys.modules

def test_error_hierarchy():
    """every package error derives from ChainlockError"""
    assert issubclass(chainlock.ChainError, chainlock.ChainlockError)
    assert issubclass(chainlock.GeometryError, chainlock.ChainlockError)
    assert issubclass(chainlock.PlanningError, chainlock.ChainlockError)
