from trivote.cli import run

run()
