"""Support for python -m stiefel_tim."""

from . import main


if __name__ == "__main__":
    main()
