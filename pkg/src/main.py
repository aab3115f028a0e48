"""
Main entry point for the counterfactual-drm CLI application.
"""

import sys

from src.cli import DrmApp


def main() -> int:
    """Main entry point function."""
    app = DrmApp()
    exit_code: int = app.run()
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
