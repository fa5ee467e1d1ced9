"""
Indoor/outdoor and private/public from phone sensors
=====================================================

Each 5-minute slot of a POI visit is scored from GPS accuracy, battery
charging, light, noise and activity. The slot scores average into four
percentages per POI, and the larger of each pair gives the label.
"""

# %%
# Two slots at a place with poor GPS accuracy while the phone charges on a
# table, then one slot without any sensor data.
from lowpoi import PipelineConfig, estimate_labels, poi_confidence, slot_confidences
from lowpoi.model import Activity
from lowpoi.prep import AlignedSlot, SensorAggregate

cfg = PipelineConfig()
slots = [
    AlignedSlot(0, accuracy=60.0, sensors=SensorAggregate(1.5, 1, 300.0, 0, Activity.STILL)),
    AlignedSlot(300, accuracy=48.0, sensors=SensorAggregate(2.5, 1, 250.0, 0, Activity.STILL)),
    AlignedSlot(600),
]
confs = [slot_confidences(s, cfg) for s in slots]
for c in confs:
    print(c.slot_start, {k: round(v, 3) for k, v in c.s.items()})

# %%
# The empty slot still counts in the denominator, so it lowers every
# percentage and shows up as the unclassified share.
p, p0 = poi_confidence(confs)
print({k: round(v, 2) for k, v in p.items()}, "unclassified", round(p0, 2))
io, pp, _, _ = estimate_labels(p, cfg.label_margin_warn)
print(io.value, pp.value)

# %%
# Percentages from four field POIs. The last one was really an outdoor
# public place; indoor wins only by about 11 points, and nothing at all
# is known about its private/public side.
field = [{2: 60.0, 4: 73.12}, {1: 83.94, 2: 2.42, 3: 22.35},
         {1: 59.78, 2: 16.24, 3: 0.61, 4: 29.66}, {1: 35.28, 2: 23.94}]
for i, p in enumerate(field, start=1):
    io, pp, warn_io, warn_pp = estimate_labels(p)
    print(f"POI {i}: {io.value:>7} / {pp.value:<7}",
          "(close call)" if warn_io or warn_pp else "")
