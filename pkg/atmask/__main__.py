"""Allow ``python -m atmask``."""
import sys

from atmask.main import main

sys.exit(main())
