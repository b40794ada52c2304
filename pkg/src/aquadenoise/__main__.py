import sys

from aquadenoise.cli import main

sys.exit(main())
