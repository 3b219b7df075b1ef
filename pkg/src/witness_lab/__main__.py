import sys

from witness_lab.cli import main

sys.exit(main())
