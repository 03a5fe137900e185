import sys

from rkcert.cli import main

sys.exit(main())
