import sys

from pointwave.cli import main

sys.exit(main())
