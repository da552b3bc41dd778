"""
ATMask - texture-aware patch masking for 3D volumes.
"""
__version__ = "1.0.0"
