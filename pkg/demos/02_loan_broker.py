"""Loan broker: a loop in the chronology.

When a lender turns a request down, the broker goes back to matching the
request against other lenders' policies.  In the chronology that shows up as
a repeat edge; in a run it shows up as the matching events firing twice.

    python demos/02_loan_broker.py [output-dir]
"""

import sys
from collections import Counter
from pathlib import Path

from tmkit import derive_chronology, export_chronology, fixtures, init, run

doc = fixtures.load("loan_broker")
chron = derive_chronology(doc.model, doc.events)
names = {e.id: e.description for e in doc.events}

print("Repeat edges:")
for src, dst in sorted(chron.repeat_edges):
    print(f"  {src} ({names[src]})\n    -> {dst} ({names[dst]})")

for scenario in ("happy", "lender_rejects_once", "borrower_declines_once", "no_offer"):
    result = run(init(doc, scenario))
    fired = [o.event_id for o in result.trace]
    twice = sorted((e for e, n in Counter(fired).items() if n > 1), key=lambda e: int(e[1:]))
    print(f"\n[{scenario}] {len(fired)} occurrences")
    print("  " + " ".join(fired))
    if twice:
        print("  repeated:", ", ".join(twice))

# A policy arriving from a lender runs independently of any request.
result = run(init(doc, "policy_supply"))
print("\n[policy_supply]", " ".join(o.event_id for o in result.trace))

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo-output")
out.mkdir(parents=True, exist_ok=True)
dot = export_chronology(chron, doc.name, names)
print(f"\nChronology written to {dot.write(out / dot.file_name(doc.name))}")
