# sandpile_app.py
# User-facing entry point for the sandpile and parking-function engine.

import sys

from engine.engine_core import main

if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        print(f"Error running sandpile: {e}", file=sys.stderr)
        sys.exit(1)
