"""Footprints, carriers and events that never happen.

Every occurrence leaves an information record behind.  On its own the record
only subsists; it exists once it is carried on some thimac.  We carry the
bulb's footprint on a punch card, then relay a cloud's footprint through an
eye and nerve signals into a brain.  Finally a cat that stays put leaves its
move onto the mat as a negative event.
"""

from tmkit import carry, fixtures, init, is_negative, mode_of, parse, run, step
from tmkit.sim import Mode

# -- bulb and punch card ---------------------------------------------------
doc = fixtures.load("bulb_punchcard")
state = init(doc, "bulb_on")
step(state)
record = state.footprints[0]
print(f"after the bulb turns on: {record.id} from {record.event_id}, carrier={record.carrier}")
carry(state, record.id, "PunchCard")
run(state)
print(f"carried on: {' -> '.join(state.carrier_history[record.id])}")
for thing in state.things.values():
    tags = ", ".join(sorted(thing.tags)) or "-"
    print(f"  thing {thing.id} of {thing.thimac} at {thing.location} (info: {tags})")

# -- relay ------------------------------------------------------------------
relay = parse("""
model Sky {
  thimac Cloud { create cloud; process shine; flow Cloud.cloud -> Cloud.shine; }
  thimac Rays { create light; release out; transfer send;
                flow Rays.light -> Rays.out; flow Rays.out -> Rays.send;
                flow Rays.send -> Eye.arrive; }
  thimac Eye { transfer arrive; receive recv; process sense;
               flow Eye.arrive -> Eye.recv; flow Eye.recv -> Eye.sense;
               trigger Eye.sense --> Brain.load; }
  thimac Brain { process load storage; }
  event E1 { region { Cloud } }
  event E2 { region { Rays, Eye.arrive } }
  event E3 { region { Eye.recv, Eye.sense } }
  event E4 { region { Brain } }
  scenario look { inject Cloud.cloud; }
}
""")
state = init(relay, "look")
step(state)
carry(state, "I1", "Rays")
run(state)
print(f"\nthe cloud's footprint travels: {' -> '.join(state.carrier_history['I1'])}")

# -- the cat and the mat ------------------------------------------------------
doc = fixtures.load("cat_mat")
move = doc.event("E3")
for scenario in ("cat_stays", "cat_moves"):
    state = init(doc, scenario)
    seen = []
    state.observers.append(lambda st, ev, tick: seen.append((tick, ev.id, mode_of(st, ev.region.id))))
    run(state)
    print(f"\n[{scenario}]")
    for tick, eid, mode in seen:
        print(f"  tick {tick}: {eid} in {mode.name.lower()}")
    verdict = "negative (never actual)" if is_negative(state, move.region.id) else "actual"
    print(f"  '{move.description}': {verdict}; now {mode_of(state, move.region.id).name.lower()}")
    assert mode_of(state, move.region.id) is Mode.SUBSISTENCE
