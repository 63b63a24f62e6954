import sys

from mobnil.cli import main

sys.exit(main())
