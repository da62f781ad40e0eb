"""The command-line workflow in a scratch directory: synth, ingest, run, report."""
import pathlib
import tempfile

from entropic_impacts.cli import main

work = pathlib.Path(tempfile.mkdtemp())
config = work / "pipeline.toml"
config.write_text("""
[synth]
seed = 2
ensemble_size = 5
days = 730
regions = ["Tropical", "Subtropical North", "Temperate North"]

[pathway.final]
variable = "TREFHT"
region = "Temperate North"
date = "1992-07-01"
""")

for command in ("synth", "ingest", "run", "report"):
    code = main([command, "--config", str(config)])
    print(f"-> {command} exited with {code}")

print("\nartifacts")
for p in sorted(work.rglob("*")):
    if p.is_file() and "pairs" not in p.parts:
        print("  ", p.relative_to(work))
print()
print((work / "output" / "graphs" / "path.csv").read_text())
