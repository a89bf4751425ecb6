# Test various modules of PEVSiter.
