"""
Grouping stay points into places
================================

Stay points recorded on different days at the same place should become one
POI. We compare accuracy-adaptive DBSCAN with the k-means and single-linkage
baselines on a small hand-made set.
"""

# %%
# Three places: a home visited four times with poor indoor accuracy, a
# cafe 150 m away visited twice, and a park 2 km away.
from lowpoi import StayPoint, dbscan_poi, hierarchical_poi, kmeans_poi
from lowpoi.geo import offset

HOME = (1.3521, 103.8198)


def visit(north, east, acc, day):
    p = offset(HOME[0], HOME[1], north, east)
    t0 = 86400 * day + 30000
    return StayPoint("u1", p.lat, p.lon, t0, t0 + 3600, acc, (0, 12))


stays = [visit(0, 0, 60, 0), visit(25, -10, 70, 1), visit(-15, 20, 55, 2), visit(10, 5, 65, 3),
         visit(150, 0, 15, 1), visit(160, 10, 12, 4),
         visit(2000, 300, 10, 2)]

# %%
# DBSCAN joins two stay points when their distance is within the sum of their
# accuracy radii, capped at 200 m. The noisy home fixes merge with each other,
# while the precise cafe fixes keep the cafe separate.
for c in dbscan_poi(stays):
    print(f"dbscan  POI {c.cluster_id}: {len(c.members)} visits")

# %%
# k-means picks k by the Davies-Bouldin index. The 2 km park dominates the
# geometry, so the best-scoring split puts home and cafe together.
print("kmeans      ->", [len(c.members) for c in kmeans_poi(stays, k_max=5)])

# %%
# Single linkage needs its cut chosen by hand. Here 50-100 m happens to
# work; at 500 m the cafe is swallowed by the home.
for cut in (50.0, 100.0, 500.0):
    print(f"single-link cut {cut:>5.0f} m ->", [len(c.members) for c in hierarchical_poi(stays, cut)])
