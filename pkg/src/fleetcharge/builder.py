"""Translate a validated scenario into the joint sizing-and-scheduling MILP.

Decision variables:
  Y[k,d,l,r,t]  binary: truck k charges for leg l (day d) on a type-r
                charger during block t of the leg's charging window;
  X[i,r]        integer: chargers of type r built at location i (co-design
                mode only; in fixed mode the counts are constants);
  dep_act       continuous: actual departure block of each leg;
  e_dep/e_arr   continuous bookkeeping: state of energy around each leg;
  C_peak[i]     continuous: demand-charge cost epigraph per location.

Energy charged in a block is rated power times block duration; energy
bought from the grid divides by charger efficiency. The peak term is
charged on power (kW), the usual demand-charge convention; building with
``peak_on_energy=True`` instead charges per-block energy (kWh) for
cross-checking against tools that define peaks that way.

Column and row order is deterministic (sorted by semantic key), so building
the same scenario twice yields byte-identical models.
"""

from __future__ import annotations

import math

from dataclasses import dataclass, field

from .domain import (
    CODESIGN,
    Scenario,
    TripLeg,
    Truck,
    charging_windows,
    tours,
)
from .model import EQ, GE, INF, LE, LinearModel

__all__ = [
    "BuildDiagnostic",
    "BuildResult",
    "VariableCatalog",
    "energy_consumption",
    "build_problem",
    "add_energy_constraints",
    "add_schedule_constraints",
    "add_capacity_constraints",
    "add_peak_epigraph",
    "add_charge_block_counts",
    "add_required_location_rows",
    "add_location_energy_capacity",
    "build_objective",
    "objective_breakdown",
    "energy_feasibility_scan",
    "plan_to_solution_values",
]

WINDOW_EMPTY = "WindowEmpty"
ENERGY_DEFICIT = "EnergyDeficit"


@dataclass(frozen=True, slots=True)
class BuildDiagnostic:
    """A structural finding made while building; infeasibility alerts mostly."""

    code: str
    message: str
    guaranteed_infeasible: bool = False


def _usable_chargers(scenario: Scenario, truck: Truck):
    """Charger types the truck can take a whole block from.

    One block at rated power delivers block-duration x power kWh; if that
    alone exceeds the pack, the battery-headroom constraint forbids the
    choice in every feasible solution, so the column would only feed the
    relaxation's fractional shortcuts.
    """
    tau = scenario.time_grid.block_duration_hours
    return [c for c in scenario.charger_catalog
            if tau * c.rated_power_kw <= truck.battery_capacity_kwh + 1e-9]


@dataclass
class VariableCatalog:
    """Maps from semantic keys to model column indices."""

    y: dict[tuple[str, int, int, int, int], int] = field(default_factory=dict)
    x: dict[tuple[str, int], int] = field(default_factory=dict)
    x_total: dict[str, int] = field(default_factory=dict)
    blocks_used: dict[tuple[str, int], int] = field(default_factory=dict)
    dep_act: dict[tuple[str, int, int], int] = field(default_factory=dict)
    e_dep: dict[tuple[str, int, int], int] = field(default_factory=dict)
    e_arr: dict[tuple[str, int, int], int] = field(default_factory=dict)
    c_peak: dict[str, int] = field(default_factory=dict)
    windows: dict[tuple[str, int, int], range] = field(default_factory=dict)

    def y_for_leg(self, truck_id: str, day: int, leg_index: int):
        return {
            (type_id, block): col
            for (tid, d, li, type_id, block), col in self.y.items()
            if tid == truck_id and d == day and li == leg_index
        }


@dataclass
class BuildResult:
    model: LinearModel
    catalog: VariableCatalog
    diagnostics: list[BuildDiagnostic]

    @property
    def guaranteed_infeasible(self) -> bool:
        return any(d.guaranteed_infeasible for d in self.diagnostics)


def energy_consumption(leg: TripLeg, truck: Truck) -> float:
    """kWh drawn by one leg: distance x effective weight x consumption rate.

    The effective weight never drops below the truck's tare, so empty
    repositioning legs still consume energy.
    """
    effective_tons = max(leg.payload_tons, truck.tare_tons)
    return leg.distance_km * effective_tons * truck.consumption_kwh_per_km_ton


def _ordered_tours(scenario: Scenario):
    for (truck_id, day), legs in tours(scenario).items():
        yield truck_id, day, scenario.truck(truck_id), legs


def _build_variables(
    scenario: Scenario, model: LinearModel, strengthen: bool = True
) -> VariableCatalog:
    cat = VariableCatalog(windows=charging_windows(scenario))
    grid = scenario.time_grid
    beta = scenario.slack_blocks

    # Charger-count columns come first: when the branching rule ties on
    # fractionality, the low index steers it toward the design decisions,
    # which prune far more than any single charging block. A per-location
    # total (an integer by construction) gets the top branching priority:
    # splitting on "how many chargers here at all" partitions the design
    # space into bands the relaxation bounds tightly.
    if scenario.design_mode == CODESIGN:
        caps = _location_demand_caps(scenario, cat)
        demanded = [loc for loc in scenario.location_ids if caps.get(loc, 0) > 0]
        if strengthen:
            for location in demanded:
                cat.x_total[location] = model.add_column(
                    f"x_total[{location}]", 0.0, float(caps[location]),
                    integer=True, branch_priority=2)
        for location in demanded:
            for charger in scenario.charger_catalog:
                cat.x[(location, charger.id)] = model.add_column(
                    f"x[{location}_r{charger.id}]", 0.0,
                    float(caps[location]), integer=True,
                    branch_priority=1)

    for truck_id, day, truck, legs in _ordered_tours(scenario):
        day_start = grid.day_start(day)
        for leg in legs:
            key = (truck_id, day, leg.leg_index)
            tag = f"{truck_id}_d{day}_l{leg.leg_index}"
            soe_lo, soe_hi = 0.0, truck.battery_capacity_kwh
            if leg.leg_index == 1:
                cat.e_dep[key] = model.add_column(
                    f"e_dep[{tag}]", truck.initial_soe_kwh, truck.initial_soe_kwh)
            else:
                cat.e_dep[key] = model.add_column(f"e_dep[{tag}]", soe_lo, soe_hi)
            cat.e_arr[key] = model.add_column(f"e_arr[{tag}]", soe_lo, soe_hi)
            cat.dep_act[key] = model.add_column(
                f"dep_act[{tag}]", float(day_start),
                float(leg.scheduled_departure_block + beta))
            usable = _usable_chargers(scenario, truck)
            for block in cat.windows[key]:
                for charger in usable:
                    cat.y[(truck_id, day, leg.leg_index, charger.id, block)] = \
                        model.add_column(
                            f"y[{tag}_r{charger.id}_t{block}]", 0.0, 1.0,
                            integer=True)

    if strengthen:
        for truck_id, day, truck, legs in _ordered_tours(scenario):
            window_slots = sum(
                len(cat.windows[(truck_id, day, leg.leg_index)]) for leg in legs)
            if window_slots > 0 and _usable_chargers(scenario, truck):
                cat.blocks_used[(truck_id, day)] = model.add_column(
                    f"blocks_used[{truck_id}_d{day}]", 0.0, float(window_slots),
                    integer=True, branch_priority=1)

    for location in scenario.location_ids:
        cat.c_peak[location] = model.add_column(f"c_peak[{location}]", 0.0, INF)
    return cat


def _location_demand_caps(scenario: Scenario, cat: VariableCatalog) -> dict[str, int]:
    """Most legs that could ever charge simultaneously at each location.

    A valid upper bound on useful charger counts; it keeps integer boxes
    small for the solver without cutting any optimum.
    """
    per_block: dict[tuple[str, int], int] = {}
    for truck_id, day, _, legs in _ordered_tours(scenario):
        for leg in legs:
            window = cat.windows[(truck_id, day, leg.leg_index)]
            for block in window:
                k = (leg.origin_id, block)
                per_block[k] = per_block.get(k, 0) + 1
    caps: dict[str, int] = {}
    for (location, _), count in per_block.items():
        caps[location] = max(caps.get(location, 0), count)
    return caps


def add_energy_constraints(
    model: LinearModel, scenario: Scenario, cat: VariableCatalog
) -> None:
    """State-of-energy bookkeeping: balance, chaining, battery headroom."""
    tau = scenario.time_grid.block_duration_hours
    for truck_id, day, truck, legs in _ordered_tours(scenario):
        for leg in legs:
            key = (truck_id, day, leg.leg_index)
            tag = f"{truck_id}_d{day}_l{leg.leg_index}"
            consumed = energy_consumption(leg, truck)
            charge_terms = [
                (cat.y[(truck_id, day, leg.leg_index, charger.id, block)],
                 tau * charger.rated_power_kw)
                for block in cat.windows[key]
                for charger in _usable_chargers(scenario, truck)
            ]
            # Arrival energy equals departure energy plus charge minus burn;
            # equality (not the looser >=) so energy cannot appear from nowhere.
            coeffs = [(cat.e_arr[key], 1.0), (cat.e_dep[key], -1.0)]
            coeffs += [(col, -coef) for col, coef in charge_terms]
            model.add_row(f"soe_balance[{tag}]", coeffs, EQ, -consumed)
            # Battery headroom: departure energy plus charge fits the pack.
            cap_coeffs = [(cat.e_dep[key], 1.0)] + charge_terms
            model.add_row(
                f"soe_cap[{tag}]", cap_coeffs, LE, truck.battery_capacity_kwh)
            if leg.leg_index > 1:
                prev = (truck_id, day, leg.leg_index - 1)
                model.add_row(
                    f"soe_chain[{tag}]",
                    [(cat.e_dep[key], 1.0), (cat.e_arr[prev], -1.0)], EQ, 0.0)


def add_schedule_constraints(
    model: LinearModel, scenario: Scenario, cat: VariableCatalog
) -> None:
    """Departure coherence: after the last charge block, inside the window."""
    for truck_id, day, _, legs in _ordered_tours(scenario):
        for leg in legs:
            key = (truck_id, day, leg.leg_index)
            tag = f"{truck_id}_d{day}_l{leg.leg_index}"
            dep_col = cat.dep_act[key]
            for block in cat.windows[key]:
                # Charging occupies [block, block+1), so departing requires
                # the block to have completed.
                coeffs = [(dep_col, 1.0)]
                for charger in scenario.charger_catalog:
                    ycol = cat.y.get((truck_id, day, leg.leg_index, charger.id, block))
                    if ycol is not None:
                        coeffs.append((ycol, -float(block + 1)))
                model.add_row(f"dep_after_charge[{tag}_t{block}]", coeffs, GE, 0.0)
            if leg.leg_index > 1:
                prev_leg = legs[leg.leg_index - 2]
                prev_key = (truck_id, day, leg.leg_index - 1)
                model.add_row(
                    f"dep_chain[{tag}]",
                    [(dep_col, 1.0), (cat.dep_act[prev_key], -1.0)],
                    GE, float(prev_leg.travel_blocks))


def add_capacity_constraints(
    model: LinearModel, scenario: Scenario, cat: VariableCatalog
) -> None:
    """Simultaneous charging fits the chargers built; one charger per truck."""
    occupancy: dict[tuple[str, int, int], list[int]] = {}
    for truck_id, day, truck, legs in _ordered_tours(scenario):
        for leg in legs:
            for block in cat.windows[(truck_id, day, leg.leg_index)]:
                for charger in _usable_chargers(scenario, truck):
                    col = cat.y[(truck_id, day, leg.leg_index, charger.id, block)]
                    occupancy.setdefault(
                        (leg.origin_id, charger.id, block), []).append(col)

    for (location, type_id, block), cols in sorted(occupancy.items()):
        coeffs = [(col, 1.0) for col in cols]
        name = f"capacity[{location}_r{type_id}_t{block}]"
        if scenario.design_mode == CODESIGN:
            coeffs.append((cat.x[(location, type_id)], -1.0))
            model.add_row(name, coeffs, LE, 0.0)
        else:
            model.add_row(name, coeffs, LE, float(scenario.fixed_count(location, type_id)))

    for truck_id, day, truck, legs in _ordered_tours(scenario):
        for leg in legs:
            key = (truck_id, day, leg.leg_index)
            tag = f"{truck_id}_d{day}_l{leg.leg_index}"
            usable = _usable_chargers(scenario, truck)
            for block in cat.windows[key]:
                coeffs = [
                    (cat.y[(truck_id, day, leg.leg_index, c.id, block)], 1.0)
                    for c in usable
                ]
                if len(coeffs) > 1:
                    model.add_row(f"one_charger[{tag}_t{block}]", coeffs, LE, 1.0)


def add_charge_block_counts(
    model: LinearModel, scenario: Scenario, cat: VariableCatalog
) -> None:
    """Whole-block counting rows: a valid strengthening of the relaxation.

    Energy bought before any leg arrives comes in whole charging blocks of
    at most block-duration x fastest-rated-power kWh each, so a tour prefix
    with a k-kWh shortfall needs at least ceil(k / that) blocks among its
    legs so far. Integer solutions all satisfy this; the relaxation without
    it pays for fractional slivers of large chargers and bounds far too low.
    """
    if not scenario.charger_catalog:
        return
    tau = scenario.time_grid.block_duration_hours
    for truck_id, day, truck, legs in _ordered_tours(scenario):
        usable = _usable_chargers(scenario, truck)
        if not usable:
            continue
        block_max_kwh = tau * max(c.rated_power_kw for c in usable)
        consumed = 0.0
        coeffs: list[tuple[int, float]] = []
        for leg in legs:
            key = (truck_id, day, leg.leg_index)
            tag = f"{truck_id}_d{day}_l{leg.leg_index}"
            coeffs += [
                (cat.y[(truck_id, day, leg.leg_index, charger.id, block)], 1.0)
                for block in cat.windows[key]
                for charger in usable
            ]
            consumed += energy_consumption(leg, truck)
            deficit = consumed - truck.initial_soe_kwh
            if deficit > 1e-9:
                blocks_needed = math.ceil(deficit / block_max_kwh - 1e-9)
                model.add_row(
                    f"min_blocks[{tag}]", list(coeffs), GE, float(blocks_needed))
        # The number of blocks a tour charges is itself an integer; giving
        # it a column of its own lets the search pin "how much" before
        # "when", instead of shaving fractional block counts forever.
        if coeffs:
            count_col = cat.blocks_used.get((truck_id, day))
            if count_col is not None:
                model.add_row(
                    f"blocks_used[{truck_id}_d{day}]",
                    list(coeffs) + [(count_col, -1.0)], EQ, 0.0)


def add_required_location_rows(
    model: LinearModel, scenario: Scenario, cat: VariableCatalog,
    peak_on_energy: bool = False,
) -> None:
    """Locations that provably must install a charger get sum(X) >= 1.

    If a tour prefix runs short of energy while every charging window seen
    so far sits at one location, any feasible plan charges there at least
    once, so that location needs at least one charger of some type. Only
    meaningful in co-design mode (fixed counts are data, not decisions).
    """
    if scenario.design_mode != CODESIGN:
        return
    for location in sorted(cat.x_total):
        coeffs = [(cat.x_total[location], 1.0)]
        coeffs += [(cat.x[(location, c.id)], -1.0) for c in scenario.charger_catalog]
        model.add_row(f"count_total[{location}]", coeffs, EQ, 0.0)
    required: set[str] = set()
    for truck_id, day, truck, legs in _ordered_tours(scenario):
        consumed = 0.0
        seen_locations: set[str] = set()
        for leg in legs:
            key = (truck_id, day, leg.leg_index)
            if len(cat.windows[key]) > 0:
                seen_locations.add(leg.origin_id)
            consumed += energy_consumption(leg, truck)
            if consumed - truck.initial_soe_kwh > 1e-9 and len(seen_locations) == 1:
                required.add(next(iter(seen_locations)))
    min_power = min((c.rated_power_kw for c in scenario.charger_catalog),
                    default=0.0)
    if peak_on_energy:
        min_power *= scenario.time_grid.block_duration_hours
    peak_price = scenario.price_schedule.peak_price_per_kw
    for location in sorted(required):
        coeffs = [(cat.x[(location, c.id)], 1.0) for c in scenario.charger_catalog]
        model.add_row(f"charger_required[{location}]", coeffs, GE, 1.0)
        # Any integer schedule that charges here at all peaks at no less
        # than one charger's rated power; the relaxation otherwise fakes a
        # lower peak by spreading fractional blocks.
        model.add_row(
            f"peak_floor[{location}]", [(cat.c_peak[location], 1.0)], GE,
            peak_price * min_power)


def add_location_energy_capacity(
    model: LinearModel, scenario: Scenario, cat: VariableCatalog
) -> None:
    """Installed power at a location must cover the energy it has to supply.

    While a tour has only ever had charging windows at a single location,
    any energy shortfall so far must be bought there, inside the union of
    those windows. Chargers of type r supply at most block-duration x rated
    power per block each, so the span times the installed power bounds the
    deliverable energy. Valid for every integer solution; the relaxation
    needs it spelled out to see that starved designs are hopeless.
    """
    if scenario.design_mode != CODESIGN:
        return
    tau = scenario.time_grid.block_duration_hours

    # Per (location, day): each truck that so far could only charge here
    # contributes (its window blocks, the energy it must buy here).
    needs: dict[tuple[str, int], list[tuple[set[int], float]]] = {}
    for truck_id, day, truck, legs in _ordered_tours(scenario):
        consumed = 0.0
        single_location: str | None = None
        broken = False
        blocks: set[int] = set()
        best_deficit = 0.0
        for leg in legs:
            window = cat.windows[(truck_id, day, leg.leg_index)]
            if len(window) > 0:
                if single_location is None:
                    single_location = leg.origin_id
                if leg.origin_id != single_location:
                    broken = True
                if not broken:
                    blocks.update(window)
            consumed += energy_consumption(leg, truck)
            if broken or single_location is None:
                continue
            best_deficit = max(best_deficit, consumed - truck.initial_soe_kwh)
        if single_location is not None and best_deficit > 1e-9 and blocks:
            needs.setdefault((single_location, day), []).append(
                (blocks, best_deficit))

    for (location, day), entries in sorted(needs.items()):
        # One row per distinct window close: trucks fully inside the prefix
        # must fit within the prefix's deliverable energy (a Hall-style
        # condition in energy units).
        closes = sorted({max(blocks) for blocks, _ in entries})
        for close in closes:
            inside = [(blocks, d) for blocks, d in entries if max(blocks) <= close]
            span = len(set().union(*(blocks for blocks, _ in inside)))
            demand = sum(d for _, d in inside)
            if span == 0 or demand <= 1e-9:
                continue
            coeffs = [
                (cat.x[(location, c.id)], tau * span * c.rated_power_kw)
                for c in scenario.charger_catalog
                if (location, c.id) in cat.x
            ]
            if coeffs:
                model.add_row(
                    f"energy_capacity[{location}_d{day}_t{close}]", coeffs,
                    GE, demand)


def add_peak_epigraph(
    model: LinearModel, scenario: Scenario, cat: VariableCatalog,
    peak_on_energy: bool = False,
) -> None:
    """Per-location demand-charge epigraph over every block.

    C_peak_i bounds the cost of the largest simultaneous power draw; since
    the objective minimizes it, the bound is tight at any optimum with a
    positive peak weight. Peak is measured in kW by default (no
    block-duration factor); ``peak_on_energy`` prices the per-block energy
    instead.
    """
    draw: dict[tuple[str, int], list[tuple[int, float]]] = {}
    for truck_id, day, truck, legs in _ordered_tours(scenario):
        for leg in legs:
            for block in cat.windows[(truck_id, day, leg.leg_index)]:
                for charger in _usable_chargers(scenario, truck):
                    col = cat.y[(truck_id, day, leg.leg_index, charger.id, block)]
                    draw.setdefault((leg.origin_id, block), []).append(
                        (col, charger.rated_power_kw))

    scale = scenario.time_grid.block_duration_hours if peak_on_energy else 1.0
    price = scenario.price_schedule.peak_price_per_kw
    for (location, block), terms in sorted(draw.items()):
        coeffs = [(cat.c_peak[location], 1.0)]
        coeffs += [(col, -price * power * scale) for col, power in terms]
        model.add_row(f"peak[{location}_t{block}]", coeffs, GE, 0.0)


def build_objective(
    model: LinearModel, scenario: Scenario, cat: VariableCatalog,
    amortize_ratio: float | None = None,
) -> None:
    """Energy purchase cost + infrastructure capital + weighted peak cost.

    In fixed mode the infrastructure cost is a constant offset so reported
    objectives stay comparable across modes. ``amortize_ratio`` optionally
    scales capital costs inside the objective (reporting always amortizes
    separately).
    """
    tau = scenario.time_grid.block_duration_hours
    prices = scenario.price_schedule.energy_price_per_kwh
    for (truck_id, day, leg_index, type_id, block), col in cat.y.items():
        charger = scenario.charger(type_id)
        price = prices[scenario.charger_index(type_id)][block]
        model.set_objective(
            col, tau * (charger.rated_power_kw / charger.efficiency) * price)

    ratio = 1.0 if amortize_ratio is None else amortize_ratio
    if scenario.design_mode == CODESIGN:
        for (location, type_id), col in cat.x.items():
            model.set_objective(col, scenario.charger(type_id).capital_cost * ratio)
    else:
        fixed_capital = sum(
            scenario.charger(c.id).capital_cost * scenario.fixed_count(loc, c.id)
            for loc in scenario.location_ids
            for c in scenario.charger_catalog
        )
        model.objective_offset += fixed_capital * ratio

    for location, col in cat.c_peak.items():
        model.set_objective(col, scenario.alpha)


def energy_feasibility_scan(scenario: Scenario) -> list[BuildDiagnostic]:
    """Upper-bound SOE walk; flags legs that cannot be reached at any cost.

    Assumes unlimited chargers of the fastest type throughout each window,
    so a negative state of energy here proves the model infeasible. A
    deficit at a leg with an empty charging window is the classic
    no-window failure; with a window it is a plain energy shortfall.
    """
    diagnostics: list[BuildDiagnostic] = []
    if not scenario.charger_catalog:
        return diagnostics
    tau = scenario.time_grid.block_duration_hours
    windows = charging_windows(scenario)
    for truck_id, day, truck, legs in _ordered_tours(scenario):
        usable = _usable_chargers(scenario, truck)
        max_power = max((c.rated_power_kw for c in usable), default=0.0)
        soe = truck.initial_soe_kwh
        for leg in legs:
            window = windows[(truck_id, day, leg.leg_index)]
            charge_cap = tau * max_power * len(window)
            soe = min(soe + charge_cap, truck.battery_capacity_kwh)
            consumed = energy_consumption(leg, truck)
            soe -= consumed
            if soe < -1e-9:
                code = WINDOW_EMPTY if len(window) == 0 else ENERGY_DEFICIT
                diagnostics.append(BuildDiagnostic(
                    code=code,
                    message=(
                        f"truck {truck_id} day {day} leg {leg.leg_index}: needs "
                        f"{consumed:.3f} kWh but at most {consumed + soe:.3f} kWh "
                        f"is reachable"
                        + (" (no charging window)" if len(window) == 0 else "")),
                    guaranteed_infeasible=True,
                ))
                soe = 0.0  # keep walking to report every defect
    return diagnostics


def build_problem(
    scenario: Scenario, amortize_ratio: float | None = None,
    strengthen: bool = True, peak_on_energy: bool = False,
) -> BuildResult:
    """Compose the full model; pure function of the scenario.

    ``strengthen=True`` (default) adds redundant-for-integers rows and
    integer bookkeeping columns (per-location charger totals, per-tour
    block counts, counting and capacity rows) that tighten the relaxation;
    the optimal set and objective value are unchanged. Oracles that
    enumerate assignments use the plain formulation.
    """
    model = LinearModel()
    cat = _build_variables(scenario, model, strengthen)
    add_energy_constraints(model, scenario, cat)
    add_schedule_constraints(model, scenario, cat)
    add_capacity_constraints(model, scenario, cat)
    add_peak_epigraph(model, scenario, cat, peak_on_energy)
    if strengthen:
        add_charge_block_counts(model, scenario, cat)
        add_required_location_rows(model, scenario, cat, peak_on_energy)
        add_location_energy_capacity(model, scenario, cat)
    build_objective(model, scenario, cat, amortize_ratio)

    diagnostics = energy_feasibility_scan(scenario)
    for key, window in sorted(cat.windows.items()):
        if len(window) == 0:
            diagnostics.append(BuildDiagnostic(
                code=WINDOW_EMPTY,
                message=(
                    f"truck {key[0]} day {key[1]} leg {key[2]} has an empty "
                    f"charging window"),
            ))
    return BuildResult(model=model, catalog=cat, diagnostics=diagnostics)


def plan_to_solution_values(
    scenario: Scenario, cat: VariableCatalog, model: LinearModel, plan
) -> list[float]:
    """Rebuild a full column assignment from a decoded plan.

    Used to hand a known-feasible plan (for instance the optimum of a
    scenario with less departure slack, whose feasible set is contained in
    this one) to the solver as a starting incumbent. Continuous columns are
    set to the canonical values implied by the events; the solver verifies
    feasibility before trusting the result.
    """
    values = [0.0] * model.num_cols
    tau = scenario.time_grid.block_duration_hours

    events_by_leg: dict[tuple[str, int, int], list] = {}
    for event in plan.events:
        events_by_leg.setdefault(
            (event.truck_id, event.day, event.leg_index), []).append(event)

    for (truck_id, day, leg_index, type_id, block), col in cat.y.items():
        for event in events_by_leg.get((truck_id, day, leg_index), []):
            if event.charger_type_id == type_id and event.block == block:
                values[col] = 1.0

    for (location, type_id), col in cat.x.items():
        values[col] = float(plan.charger_counts.get(location, {}).get(type_id, 0))
    for location, col in cat.x_total.items():
        values[col] = float(sum(plan.charger_counts.get(location, {}).values()))
    for (truck_id, day), col in cat.blocks_used.items():
        values[col] = float(sum(
            len(evts) for key, evts in events_by_leg.items()
            if key[0] == truck_id and key[1] == day))

    grid = scenario.time_grid
    for (truck_id, day), legs in tours(scenario).items():
        truck = scenario.truck(truck_id)
        soe = truck.initial_soe_kwh
        prev_dep = float(grid.day_start(day))
        prev_travel = 0
        for leg in legs:
            key = (truck_id, day, leg.leg_index)
            charged = sum(
                tau * scenario.charger(e.charger_type_id).rated_power_kw
                for e in events_by_leg.get(key, []))
            values[cat.e_dep[key]] = soe
            soe = soe + charged - energy_consumption(leg, truck)
            values[cat.e_arr[key]] = soe
            floor_block = prev_dep + prev_travel if leg.leg_index > 1 \
                else float(grid.day_start(day))
            last = max((e.block for e in events_by_leg.get(key, [])), default=None)
            dep_act = floor_block if last is None else max(floor_block, last + 1.0)
            values[cat.dep_act[key]] = dep_act
            prev_dep = dep_act
            prev_travel = leg.travel_blocks

    price = scenario.price_schedule.peak_price_per_kw
    draw: dict[tuple[str, int], float] = {}
    for event in plan.events:
        power = scenario.charger(event.charger_type_id).rated_power_kw
        k = (event.location_id, event.block)
        draw[k] = draw.get(k, 0.0) + power
    for location, col in cat.c_peak.items():
        peak_kw = max((kw for (loc, _), kw in draw.items() if loc == location),
                      default=0.0)
        floor = 0.0
        for row in model.rows:
            if row.name == f"peak_floor[{location}]":
                floor = row.rhs
        values[col] = max(price * peak_kw, floor)
    return values


def objective_breakdown(
    scenario: Scenario, cat: VariableCatalog, values, model: LinearModel
) -> dict[str, float]:
    """Split a solution's objective into energy/infrastructure/peak parts.

    This is the model-side decomposition (it reads objective coefficients);
    the validator recomputes the same quantities independently.
    """
    tau = scenario.time_grid.block_duration_hours
    prices = scenario.price_schedule.energy_price_per_kwh
    energy = 0.0
    for (truck_id, day, leg_index, type_id, block), col in cat.y.items():
        charger = scenario.charger(type_id)
        energy += float(values[col]) * tau \
            * (charger.rated_power_kw / charger.efficiency) \
            * prices[scenario.charger_index(type_id)][block]
    if scenario.design_mode == CODESIGN:
        infra = sum(
            scenario.charger(type_id).capital_cost * float(values[col])
            for (loc, type_id), col in cat.x.items())
    else:
        infra = model.objective_offset
    peak = scenario.alpha * sum(values[col] for col in cat.c_peak.values())
    return {
        "energy": energy,
        "infrastructure": float(infra),
        "peak": float(peak),
        "total": energy + float(infra) + float(peak),
    }
