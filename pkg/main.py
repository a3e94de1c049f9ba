#!/usr/bin/env python3
"""
Forest Fire Clustering
Main entry point for the command-line tool
"""

import sys
import os

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from forest_fire.cli import main

if __name__ == "__main__":
    sys.exit(main())
