# coding: utf-8
import sys

from pydybm.cli.dybm_cli import main

sys.exit(main())
