"""Run the command line interface with ``python -m swapsim``."""

import sys

from .cli import main

sys.exit(main())
