import sys

from flow_ldp.ldp_cli import main


if __name__ == "__main__":
    sys.exit(main())
