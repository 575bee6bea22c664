import sys

from solharm.cli import main

sys.exit(main())
