import sys

from nsmoo.main import main

sys.exit(main())
