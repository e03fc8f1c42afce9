"""Independent brute-force hour stepper used as a dispatch oracle.

Deliberately written without touching pvdistrict.dispatch internals: plain
Python lists, day-major iteration, explicit branches. It follows the same
dispatch rules (PV to load, charge, export; discharge, import;
EV driving draw and midnight top-up), so any divergence from the production
kernel is a bug in one of the two.
"""


def reference_simulate(demand, pv, *, nominal, soc_floor, eta_c, eta_d,
                       power_limit, availability, driving, health, soc0, topup):
    n = len(demand)
    out = {
        "pv_to_load": [0.0] * n,
        "pv_to_batt": [0.0] * n,
        "batt_to_load": [0.0] * n,
        "import": [0.0] * n,
        "export": [0.0] * n,
        "grid_to_batt": [0.0] * n,
        "driving": [0.0] * n,
        "losses": [0.0] * n,
        "soc": [0.0] * n,
    }
    plim = float("inf") if power_limit is None else power_limit
    soc = soc0
    n_days = (n + 23) // 24
    for day in range(n_days):
        for hour_of_day in range(24):
            h = day * 24 + hour_of_day
            if h >= n:
                break
            loss = 0.0

            if hour_of_day == 0 and topup and soc < soc_floor:
                stored = soc_floor - soc
                purchase = stored / eta_c
                out["grid_to_batt"][h] = purchase
                loss += purchase - stored
                soc = soc_floor

            trip_energy = driving[h]
            if trip_energy > soc:
                trip_energy = soc
            soc -= trip_energy
            out["driving"][h] = trip_energy

            load = demand[h]
            gen = pv[h]
            if gen >= load:
                direct = load
            else:
                direct = gen
            surplus = gen - direct
            deficit = load - direct

            cap = health * availability[h] * nominal
            headroom = cap - soc
            if headroom < 0.0:
                headroom = 0.0
            max_in = headroom / eta_c
            if max_in > plim:
                max_in = plim
            if surplus <= max_in:
                charged = surplus
            else:
                charged = max_in
            soc = soc + charged * eta_c
            loss += charged - charged * eta_c
            exported = surplus - charged

            floor_here = soc_floor
            locked = (1.0 - availability[h]) * soc
            if locked > floor_here:
                floor_here = locked
            reachable = soc - floor_here
            if reachable < 0.0:
                reachable = 0.0
            max_out = reachable * eta_d
            if max_out > plim:
                max_out = plim
            if deficit <= max_out:
                delivered = deficit
            else:
                delivered = max_out
            pulled = delivered / eta_d
            soc = soc - pulled
            loss += pulled - delivered

            out["pv_to_load"][h] = direct
            out["pv_to_batt"][h] = charged
            out["batt_to_load"][h] = delivered
            out["export"][h] = exported
            out["import"][h] = (deficit - delivered) + out["grid_to_batt"][h]
            out["losses"][h] = loss
            out["soc"][h] = soc
    return out
