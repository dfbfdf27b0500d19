import sys

from utils.cliutils import main

if __name__ == "__main__":
    sys.exit(main())
