"""Pathway graphs from every series of the default synthetic world."""
import datetime as dt

from entropic_impacts.pathway import export_dot, source_impact_dag
from entropic_impacts.pipeline import analyze_pairs, build_pathway
from entropic_impacts.synth import SynthConfig, generate_pair

pairs, truth = generate_pair(SynthConfig(seed=0))
results = analyze_pairs(pairs)
records = [r for res in results.values() for r in res.records]
print(len(pairs), "series,", len(records), "intervals,", sum(r.significant for r in records), "significant")

# the final impact: temperate-north cooling in mid 1992
result = build_pathway(records, final=("TREFHT", "Temperate North", dt.date(1992, 7, 1)))
print("full DAG  ", len(result.full), "nodes", len(result.full.edges), "edges")
print("impact DAG", len(result.impact), "nodes", len(result.impact.edges), "edges")

print("\nsource-impact path")
for node in result.path:
    r = result.impact.nodes[node]
    print(f"  {r.variable:8s} {r.region:18s} {r.start_date}..{r.end_date}  "
          f"{r.mean_diff:9.3f} ({r.ci_low:.3f},{r.ci_high:.3f})  {r.score:8.2f}")

print()
print(export_dot(source_impact_dag(result.impact, list(result.path))))
