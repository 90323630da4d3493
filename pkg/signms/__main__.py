from signms.cli import cli

cli(prog_name="signms")
