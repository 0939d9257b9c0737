import sys

from phmaps.main import main

sys.exit(main())
