"""
ATMask command-line entry point.

Logging is configured by run() via logging_config.
"""
import sys
from typing import List, Optional

from atmask.core import run


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
