import sys

from nearid.cli.main import main

sys.exit(main())
