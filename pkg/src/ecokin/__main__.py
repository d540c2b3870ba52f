import sys

from ecokin.cli import main

sys.exit(main())
