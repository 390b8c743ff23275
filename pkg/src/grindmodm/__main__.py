import sys

from grindmodm.cli import main

sys.exit(main())
