#!/usr/bin/env python3
"""
🚀 Startup Script
Developer launcher: runs the ittdns command line from a source checkout
"""
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from ittdns.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
