# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

import sys

from wand.cli import main

sys.exit(main())
