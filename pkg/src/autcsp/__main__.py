import sys

from autcsp.cli import main

sys.exit(main())
