import sys

from kzspec.cli import main

sys.exit(main())
