"""
From raw logs to labelled POIs
==============================

Runs every stage on a synthetic day with two places, writes the artifacts
to a temporary directory and scores them against the generator's truth.
"""

# %%
import json
import tempfile
from pathlib import Path

from lowpoi import PipelineConfig
from lowpoi.pipeline import run_pipeline
from lowpoi.scoring import score_run
from lowpoi.synth import generate_synthetic, two_poi_scenario

work = Path(tempfile.mkdtemp(prefix="lowpoi-"))
paths = generate_synthetic(two_poi_scenario(seed=7)).write(work / "input")

# %%
# The pipeline deduplicates rows, normalizes noise, finds validated stay
# points, clusters them, builds the visit sequence and classifies each POI.
manifest = run_pipeline(paths["locations"], paths["sensors"], PipelineConfig(), work / "run")
print(json.dumps(manifest.counts, indent=1, sort_keys=True))

# %%
# One GeoJSON feature per POI, carrying its labels and percentages.
fc = json.loads((work / "run" / "poi_clusters.geojson").read_text())
for f in fc["features"]:
    pr = f["properties"]
    print(pr["cluster_id"], pr["io_label"], pr["pp_label"],
          {k: None if pr[k] is None else round(pr[k], 1) for k in ("P1", "P2", "P3", "P4", "P0")})

# %%
print(json.dumps(score_run(work / "run", paths["truth"]), indent=1, sort_keys=True))
print("artifacts in", work / "run")
