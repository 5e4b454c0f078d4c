"""Main CLI entry point for sdvsr."""
import typer

from sdvsr.commands.ablate import ablate_command
from sdvsr.commands.degrade import degrade_command
from sdvsr.commands.evaluate import eval_command
from sdvsr.commands.infer import infer_command
from sdvsr.commands.synth import synth_command
from sdvsr.commands.train import train_command

app = typer.Typer(help="Structure-detail recurrent video super-resolution", no_args_is_help=True)
app.command("train")(train_command)
app.command("infer")(infer_command)
app.command("eval")(eval_command)
app.command("ablate")(ablate_command)
app.command("synth")(synth_command)
app.command("degrade")(degrade_command)


def main() -> None:
    """Main entry point."""
    app()


if __name__ == "__main__":
    main()
