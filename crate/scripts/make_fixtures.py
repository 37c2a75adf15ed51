#!/usr/bin/env python3
"""Regenerates the JSON network fixtures under fixtures/.

Both networks are synthetic: the 24-bus case reuses the public RTS-24
topology (38 branches, 17 load buses) with stylized reactances, ratings,
costs and wildfire data chosen so that the three riskiest lines are 2-4,
7-8 and 10-12 with scaled ignition probabilities 0.01383 / 0.01807 / 0.0222.
"""

import json
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def three_bus():
    return {
        "meta": {"horizon": 4, "mva_base": 100.0, "theta_max": 0.6, "wip_scale": 1.0},
        "buses": [
            {"id": 1, "name": "gen-hub", "is_reference": True},
            {"id": 2, "name": "load-a", "is_reference": False},
            {"id": 3, "name": "load-b", "is_reference": False},
        ],
        "lines": [
            {
                "id": 1, "from_bus": 1, "to_bus": 2, "susceptance": 5.0,
                "flow_min": -250.0, "flow_max": 250.0,
                "wip_base": 0.0, "wip_deenergized": 1.0, "svi": 0.3, "impact": 0.0,
            },
            {
                "id": 2, "from_bus": 1, "to_bus": 3, "susceptance": 5.0,
                "flow_min": -55.0, "flow_max": 55.0,
                "wip_base": 0.05, "wip_deenergized": 1.0, "svi": 0.6, "impact": 500.0,
            },
            {
                "id": 3, "from_bus": 2, "to_bus": 3, "susceptance": 5.0,
                "flow_min": -55.0, "flow_max": 55.0,
                "wip_base": 0.08, "wip_deenergized": 1.0, "svi": 0.9, "impact": 800.0,
            },
        ],
        "generators": [
            {
                "id": 1, "bus": 1, "p_min": 20.0, "p_max": 200.0,
                "ramp_min": -180.0, "ramp_max": 180.0,
                "cost_marginal": 10.0, "cost_up": 400.0, "cost_dn": 100.0,
                "min_up": 2, "min_dn": 2, "initial_status": True,
            },
            {
                "id": 2, "bus": 2, "p_min": 10.0, "p_max": 120.0,
                "ramp_min": -120.0, "ramp_max": 120.0,
                "cost_marginal": 35.0, "cost_up": 250.0, "cost_dn": 80.0,
                "min_up": 1, "min_dn": 1, "initial_status": False,
            },
        ],
        "demands": [
            {
                "id": 1, "bus": 2, "voll": 5000.0,
                "profile": {"1": [90.0, 110.0, 130.0, 100.0], "2": [70.0, 90.0, 105.0, 85.0]},
            },
            {
                "id": 2, "bus": 3, "voll": 5000.0,
                "profile": {"1": [40.0, 55.0, 65.0, 50.0], "2": [30.0, 45.0, 50.0, 40.0]},
            },
        ],
        "demand_scenarios": [
            {"id": 1, "probability": 0.6},
            {"id": 2, "probability": 0.4},
        ],
    }


# RTS-24 branch list: (from, to, reactance pu). Doubles are genuine parallel
# circuits of the reference system.
RTS_BRANCHES = [
    (1, 2, 0.0139), (1, 3, 0.2112), (1, 5, 0.0845), (2, 4, 0.1267),
    (2, 6, 0.1920), (3, 9, 0.1190), (3, 24, 0.0839), (4, 9, 0.1037),
    (5, 10, 0.0883), (6, 10, 0.0605), (7, 8, 0.0614), (8, 9, 0.1651),
    (8, 10, 0.1651), (9, 11, 0.0839), (9, 12, 0.0839), (10, 11, 0.0839),
    (10, 12, 0.0839), (11, 13, 0.0476), (11, 14, 0.0418), (12, 13, 0.0476),
    (12, 23, 0.0966), (13, 23, 0.0865), (14, 16, 0.0389), (15, 16, 0.0173),
    (15, 21, 0.0490), (15, 21, 0.0490), (15, 24, 0.0519), (16, 17, 0.0259),
    (16, 19, 0.0231), (17, 18, 0.0144), (17, 22, 0.1053), (18, 21, 0.0259),
    (18, 21, 0.0259), (19, 20, 0.0396), (19, 20, 0.0396), (20, 23, 0.0216),
    (20, 23, 0.0216), (21, 22, 0.0678),
]

TRANSFORMERS = {(3, 24), (9, 11), (9, 12), (10, 11), (10, 12)}

# Wildfire data per line id: (wip_base pre-scale, svi, impact acres).
WILDFIRE = {
    3: (4.0e-7, 0.30, 400.0),     # 1-5
    4: (1.383e-6, 0.60, 1200.0),  # 2-4
    11: (1.807e-6, 0.80, 900.0),  # 7-8
    17: (2.22e-6, 0.70, 1500.0),  # 10-12
    25: (8.0e-7, 0.50, 600.0),    # 15-21
    28: (6.0e-7, 0.45, 500.0),    # 16-17
}

# Load share per bus (percent of system peak), RTS peak-load split.
LOAD_SHARE = {
    1: 3.8, 2: 3.4, 3: 6.3, 4: 2.6, 5: 2.5, 6: 4.8, 7: 4.4, 8: 6.0,
    9: 6.1, 10: 6.8, 13: 9.3, 14: 6.8, 15: 11.1, 16: 3.5, 18: 11.7,
    19: 6.4, 20: 4.5,
}

HOURLY_SHAPE = [
    0.67, 0.63, 0.60, 0.59, 0.59, 0.60, 0.74, 0.86, 0.95, 0.96, 0.96, 0.95,
    0.95, 0.95, 0.93, 0.94, 0.99, 1.00, 1.00, 0.96, 0.91, 0.83, 0.73, 0.63,
]

SCEN_PROBS = [0.10, 0.20, 0.35, 0.20, 0.15]
SCEN_SCALE = [0.88, 0.95, 1.00, 1.06, 1.13]
SYSTEM_PEAK = 1850.0

GENERATORS = [
    # (bus, p_min, p_max, ramp, marginal, up, dn, min_up, min_dn, init)
    (13, 150.0, 500.0, 200.0, 12.0, 800.0, 300.0, 4, 4, True),
    (23, 120.0, 450.0, 180.0, 15.0, 700.0, 250.0, 4, 4, True),
    (18, 100.0, 400.0, 160.0, 19.0, 600.0, 200.0, 3, 3, True),
    (21, 100.0, 350.0, 150.0, 24.0, 500.0, 180.0, 3, 3, True),
    (7, 50.0, 250.0, 250.0, 32.0, 350.0, 120.0, 2, 2, False),
    (15, 40.0, 300.0, 300.0, 40.0, 250.0, 100.0, 2, 2, False),
]


def rts24():
    buses = [
        {"id": b, "name": f"bus{b}", "is_reference": b == 13}
        for b in range(1, 25)
    ]
    lines = []
    for i, (f, t, x) in enumerate(RTS_BRANCHES, start=1):
        if (f, t) in TRANSFORMERS:
            rating = 400.0
        elif max(f, t) <= 10:
            rating = 175.0
        else:
            rating = 500.0
        wip, svi, impact = WILDFIRE.get(i, (0.0, 0.2, 0.0))
        lines.append({
            "id": i, "from_bus": f, "to_bus": t,
            "susceptance": round(1.0 / x, 6),
            "flow_min": -rating, "flow_max": rating,
            "wip_base": wip, "wip_deenergized": 1.0,
            "svi": svi, "impact": impact,
        })

    gens = []
    for i, (bus, pmin, pmax, ramp, marg, up, dn, mu, md, init) in enumerate(
        GENERATORS, start=1
    ):
        gens.append({
            "id": i, "bus": bus, "p_min": pmin, "p_max": pmax,
            "ramp_min": -ramp, "ramp_max": ramp,
            "cost_marginal": marg, "cost_up": up, "cost_dn": dn,
            "min_up": mu, "min_dn": md, "initial_status": init,
        })

    demands = []
    for i, (bus, share) in enumerate(sorted(LOAD_SHARE.items()), start=1):
        profile = {}
        for w, scale in enumerate(SCEN_SCALE, start=1):
            profile[str(w)] = [
                round(SYSTEM_PEAK * share / 100.0 * h * scale, 3)
                for h in HOURLY_SHAPE
            ]
        demands.append({"id": i, "bus": bus, "voll": 5000.0, "profile": profile})

    # Per-scenario WIP multipliers averaging exactly to 1 under SCEN_PROBS so
    # the expected WIP equals the headline per-line values.
    mult = [0.85, 0.92, 1.00, 1.06]
    tail = (1.0 - sum(p * m for p, m in zip(SCEN_PROBS, mult))) / SCEN_PROBS[-1]
    mult.append(tail)
    scenarios = []
    for w, (p, m) in enumerate(zip(SCEN_PROBS, mult), start=1):
        overrides = {
            str(line_id): WILDFIRE[line_id][0] * m
            for line_id in (4, 11, 17)
        }
        scenarios.append({"id": w, "probability": p, "wip_overrides": overrides})

    return {
        "meta": {"horizon": 24, "mva_base": 100.0, "theta_max": 0.6, "wip_scale": 1.0e4},
        "buses": buses,
        "lines": lines,
        "generators": gens,
        "demands": demands,
        "demand_scenarios": scenarios,
    }


def main():
    os.makedirs(OUT, exist_ok=True)
    for name, net in [("net3.json", three_bus()), ("rts24.json", rts24())]:
        path = os.path.join(OUT, name)
        with open(path, "w") as fh:
            json.dump(net, fh, indent=1)
            fh.write("\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
