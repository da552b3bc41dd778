"""
Services package for ATMask.
"""
