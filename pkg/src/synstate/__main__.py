import sys

from synstate.cli import main

sys.exit(main())
