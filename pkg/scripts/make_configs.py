"""Regenerate the bundled scenario configs under src/epnrecovery/data/.

Gilroy-like community: a 6 x 6 grid over 41.9 km^2 holding 48,821 residents,
six food retailers, and a synthetic power network fed from one source
substation. Coordinates are planar km with the grid's south-west corner at
the origin; the scenario event sits 12 km south-west of the grid centre.

Network layout (all synthetic):

* ``llagas`` source substation at the south-east edge of town;
* a double-circuit transmission corridor (two tower spans per circuit) to
  each of four distribution substations, one per quadrant;
* two tie lines (north pair, south pair) between distribution substations;
* three feeder nodes per quadrant, each serving three grid cells, fed by a
  primary line segment from the quadrant substation and a backup segment
  from the horizontally adjacent substation.

Two resource units; 47 damageable components.

Fragility medians/dispersions and restoration days are HAZUS-like
placeholders with one dispersion per class so curves never cross.

Run:  python scripts/make_configs.py
"""
from __future__ import annotations

import math
from pathlib import Path

import yaml

from fit_attenuation import fit_beta0

DATA = Path(__file__).resolve().parents[1] / "src" / "epnrecovery" / "data"

AREA_KM2 = 41.9
POPULATION = 48_821
SIDE = math.sqrt(AREA_KM2)
CELL = SIDE / 6

ATTEN = dict(beta1=0.5, beta2=1.0, c_near=6.0)

FRAGILITY = {
    "substation": dict(medians=[0.15, 0.29, 0.45, 0.90], betas=[0.5] * 4,
                       restoration_days=[1.0, 3.0, 7.0, 30.0]),
    "distribution_node": dict(medians=[0.13, 0.26, 0.34, 0.74], betas=[0.5] * 4,
                              restoration_days=[1.0, 3.0, 7.0, 30.0]),
    "transmission_tower": dict(medians=[0.30, 0.50, 0.80, 1.20], betas=[0.55] * 4,
                               restoration_days=[1.0, 3.0, 6.0, 12.0]),
    "line_segment": dict(medians=[0.28, 0.40, 0.70, 1.10], betas=[0.5] * 4,
                         restoration_days=[1.0, 2.0, 4.0, 7.0]),
}


# backup feed for each quadrant's feeders comes from the horizontal neighbour
ALT_SOURCE = {"nw": "ne", "ne": "nw", "sw": "se", "se": "sw"}


def r3(x):
    return round(float(x), 3)


def populations():
    """Density peaking downtown, rounded by largest remainder to the census total."""
    cx, cy = 0.55 * SIDE, 0.5 * SIDE
    w = []
    for row in range(6):
        for col in range(6):
            x, y = (col + 0.5) * CELL, (row + 0.5) * CELL
            d2 = (x - cx) ** 2 + (y - cy) ** 2
            w.append(math.exp(-d2 / (2 * 1.6**2)) + 0.12)
    total = sum(w)
    raw = [POPULATION * wi / total for wi in w]
    pops = [int(math.floor(v)) for v in raw]
    short = POPULATION - sum(pops)
    for i in sorted(range(36), key=lambda i: raw[i] - pops[i], reverse=True)[:short]:
        pops[i] += 1
    return pops


def gilroy(circuits=2, n_units=2, alt_feeders=True):
    quads = {"nw": (1.5, 4.5), "ne": (4.5, 4.5), "sw": (1.5, 1.5), "se": (4.5, 1.5)}
    nodes = {"llagas": (r3(0.8 * SIDE), r3(-0.6))}
    edges, comps = [], []
    comps.append(dict(id="SUB-LLAGAS", **{"class": "substation"}, node="llagas"))
    sx, sy = nodes["llagas"]
    for q, (qx, qy) in quads.items():
        ds = f"ds-{q}"
        nodes[ds] = (r3(qx * CELL), r3(qy * CELL))
        comps.append(dict(id=f"DSS-{q.upper()}", **{"class": "distribution_node"}, node=ds))
        for k, shift in zip("AB"[:circuits], (-0.25, 0.25)):
            tw = f"tw-{q}{k.lower()}"
            nodes[tw] = (r3((sx + nodes[ds][0]) / 2 + shift), r3((sy + nodes[ds][1]) / 2 - shift))
            edges += [["llagas", tw], [tw, ds]]
            comps.append(dict(id=f"TWR-{q.upper()}{k}-1", **{"class": "transmission_tower"}, edge=["llagas", tw]))
            comps.append(dict(id=f"TWR-{q.upper()}{k}-2", **{"class": "transmission_tower"}, edge=[tw, ds]))
    for a, b in (("nw", "ne"), ("sw", "se")):
        edges.append([f"ds-{a}", f"ds-{b}"])
        comps.append(dict(id=f"TIE-{a.upper()}-{b.upper()}", **{"class": "line_segment"},
                          edge=[f"ds-{a}", f"ds-{b}"]))

    pops = populations()
    cells, feeder_of = [], {}
    for q, (qx, qy) in quads.items():
        col0, row0 = int(qx - 1.5), int(qy - 1.5)
        for j in range(3):
            f = f"fd-{q}{j + 1}"
            row = row0 + j
            nodes[f] = (r3((col0 + 1.5) * CELL), r3((row + 0.5) * CELL))
            edges.append([f"ds-{q}", f])
            comps.append(dict(id=f"FDR-{q.upper()}-{j + 1}", **{"class": "line_segment"}, edge=[f"ds-{q}", f]))
            if alt_feeders:
                alt = ALT_SOURCE[q]
                edges.append([f"ds-{alt}", f])
                comps.append(dict(id=f"ALT-{q.upper()}-{j + 1}", **{"class": "line_segment"},
                                  edge=[f"ds-{alt}", f]))
            for col in range(col0, col0 + 3):
                feeder_of[(row, col)] = f
    for row in range(6):
        for col in range(6):
            cells.append(dict(
                id=f"c{row}{col}",
                centroid=[r3((col + 0.5) * CELL), r3((row + 0.5) * CELL)],
                population=pops[row * 6 + col],
                load_point=feeder_of[(row, col)],
            ))

    # six stores: two large supermarkets downtown, the rest spread out
    stores = [("R1", (3, 3), 3.0), ("R2", (2, 3), 2.5), ("R3", (4, 1), 1.5),
              ("R4", (1, 4), 1.0), ("R5", (5, 2), 1.0), ("R6", (0, 0), 1.2)]
    retailers = []
    for rid, (row, col), cap in stores:
        retailers.append(dict(id=rid, location=[r3((col + 0.5) * CELL), r3((row + 0.5) * CELL)],
                              capacity=cap, load_point=feeder_of[(row, col)]))

    centre = (SIDE / 2, SIDE / 2)
    off = 12.0 / math.sqrt(2.0)
    beta0 = fit_beta0(0.40, 6.9, 12.0, **ATTEN)
    return dict(
        name="gilroy-like",
        description=("Synthetic Gilroy-like community (36 cells, 48,821 residents, 6 retailers). "
                     "Travel times = Euclidean centroid distance / 0.5 km per minute. "
                     "Fragility and restoration values are HAZUS-like placeholders."),
        resources=dict(n_units=n_units),
        defaults=dict(gamma=0.8, mode="combined", scenarios=100, samples=30, objective=1),
        community=dict(
            gravity=dict(b=-0.1, speed_km_per_min=0.5),
            cells=cells,
            retailers=retailers,
        ),
        hazard=dict(
            event=dict(magnitude=6.9, epicenter=[r3(centre[0] - off), r3(centre[1] - off)], depth_km=8.0),
            attenuation=dict(beta0=round(beta0, 6), **ATTEN, sigma_inter=0.3, sigma_intra=0.45),
        ),
        fragility=FRAGILITY,
        network=dict(
            nodes=[dict(id=k, xy=list(v)) for k, v in nodes.items()],
            edges=edges,
            sources=["llagas"],
            components=comps,
        ),
    )


def toy():
    """Five damageable components, four cells, two retailers; small enough for exact DP."""
    nodes = {"src": (0.0, 0.0), "a": (1.0, 0.0), "b": (2.0, 0.0), "c": (1.0, 1.0), "d": (2.0, 1.0)}
    edges = [["src", "a"], ["a", "b"], ["src", "c"], ["c", "d"], ["b", "d"]]
    comps = [
        dict(id="SUB", **{"class": "substation"}, node="src"),
        dict(id="L-A", **{"class": "line_segment"}, edge=["src", "a"]),
        dict(id="L-AB", **{"class": "line_segment"}, edge=["a", "b"]),
        dict(id="L-C", **{"class": "line_segment"}, edge=["src", "c"]),
        dict(id="L-CD", **{"class": "line_segment"}, edge=["c", "d"]),
        dict(id="L-BD", **{"class": "line_segment"}, edge=["b", "d"], damageable=False),
    ]
    cells = [
        dict(id="ca", centroid=[1.0, -0.5], population=1200, load_point="a"),
        dict(id="cb", centroid=[2.0, -0.5], population=800, load_point="b"),
        dict(id="cc", centroid=[1.0, 1.5], population=500, load_point="c"),
        dict(id="cd", centroid=[2.0, 1.5], population=1500, load_point="d"),
    ]
    retailers = [
        dict(id="RA", location=[1.2, 0.0], capacity=2.0, load_point="a"),
        dict(id="RD", location=[2.2, 1.0], capacity=1.0, load_point="d"),
    ]
    return dict(
        name="toy",
        description="Five-component toy network for exact-DP comparisons and fast tests.",
        resources=dict(n_units=2),
        defaults=dict(gamma=0.8, mode="combined", scenarios=200, samples=30, objective=1),
        community=dict(gravity=dict(b=-0.1, speed_km_per_min=0.5), cells=cells, retailers=retailers),
        hazard=dict(
            event=dict(magnitude=6.9, epicenter=[-6.0, -6.0], depth_km=8.0),
            attenuation=dict(beta0=round(fit_beta0(0.40, 6.9, 12.0, **ATTEN), 6), **ATTEN,
                             sigma_inter=0.3, sigma_intra=0.45),
        ),
        fragility={k: FRAGILITY[k] for k in ("substation", "line_segment")},
        network=dict(nodes=[dict(id=k, xy=list(v)) for k, v in nodes.items()], edges=edges,
                     sources=["src"], components=comps),
    )


class _Dumper(yaml.SafeDumper):
    pass


def _flow_lists(dumper, data):
    flow = all(not isinstance(x, (dict, list)) for x in data)
    return dumper.represent_sequence("tag:yaml.org,2002:seq", data, flow_style=flow)


_Dumper.add_representer(list, _flow_lists)


def write(name, cfg):
    path = DATA / name
    header = "# Generated by scripts/make_configs.py; schema: config.schema.json\n"
    path.write_text(header + yaml.dump(cfg, Dumper=_Dumper, sort_keys=False, width=100))
    print(f"wrote {path}")


if __name__ == "__main__":
    import sys
    if len(sys.argv) > 1:
        c, n, a = map(int, sys.argv[1:4])
        write("gilroy_like.yaml", gilroy(c, n, bool(a)))
    else:
        write("gilroy_like.yaml", gilroy())
    write("toy.yaml", toy())
