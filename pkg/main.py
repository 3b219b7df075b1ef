import sys

from witness_lab.cli import main

if __name__ == "__main__":
    sys.exit(main())
