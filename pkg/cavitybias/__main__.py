# cavitybias/__main__.py
from .main import cli

cli(prog_name="cavitybias")
