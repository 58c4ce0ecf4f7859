"""Hypothesis strategies shared by the round-trip tests."""

from hypothesis import strategies as st

from tmkit.dsl import ModelDocument
from tmkit.events import EventDef, extract_region
from tmkit.metamodel import ActionKind as K, ModelBuilder, flow_legal
from tmkit.sim import Scenario

DESCRIPTIONS = st.one_of(st.none(), st.text(
    alphabet=st.characters(codec="utf-8", exclude_categories=("Cs", "Cc")) | st.sampled_from('"\\'),
    max_size=12))


@st.composite
def documents(draw):
    b = ModelBuilder(draw(st.sampled_from(["M", "World", "Sys2"])))
    tids = []
    for i in range(draw(st.integers(0, 4))):
        parent = draw(st.sampled_from([None] + tids))
        tids.append(b.thimac(f"t{i}", parent, draw(st.sampled_from([None, "material", "immaterial"]))))
    labelled = []
    n = 0
    for tid in tids:
        kinds = draw(st.lists(st.sampled_from(list(K)), max_size=5))
        if kinds.count(K.CREATE) > 1:
            kinds = [k for k in kinds if k is not K.CREATE] + [K.CREATE]
        for kind in kinds:
            named = draw(st.booleans()) or kind is K.CREATE
            aid = b.action(tid, kind, f"a{n}" if named else None, draw(st.booleans()))
            n += 1
            if named:
                labelled.append((aid, kind, tid))
    legal = [(s, d) for s, sk, so in labelled for d, dk, do in labelled
             if flow_legal(sk, dk, so == do)]
    flows = set(draw(st.lists(st.sampled_from(legal), max_size=8, unique=True))) if legal else set()
    for s, d in flows:
        b.flow(s, d)
    others = [(s, d) for s, *_ in labelled for d, *_ in labelled if s != d and (s, d) not in flows]
    if others:
        for s, d in draw(st.lists(st.sampled_from(others), max_size=4, unique=True)):
            b.trigger(s, d)
    model = b.build()

    events = []
    ids = [a for a, *_ in labelled]
    for i in range(draw(st.integers(0, 3)) if ids else 0):
        head = draw(st.sampled_from(ids))
        region = [head]
        nxt = [s for s in model.successors(head) if s != head]
        if nxt and draw(st.booleans()):
            region.append(draw(st.sampled_from(nxt)))
        events.append(EventDef(f"E{i + 1}", f"E{i + 1}", extract_region(model, region),
                               draw(DESCRIPTIONS)))

    scenarios = []
    points = [a for a in ids if model.is_decision_point(a)]
    heads = [a for a, k, _ in labelled if k in (K.CREATE, K.TRANSFER)]
    for i in range(draw(st.integers(0, 2))):
        choices = {p: tuple(draw(st.lists(st.sampled_from(model.successors(p)), min_size=1, max_size=3)))
                   for p in points if draw(st.booleans())}
        inject = tuple(draw(st.lists(st.sampled_from(heads), max_size=2))) if heads else ()
        scenarios.append(Scenario(f"s{i}", choices, inject))
    return ModelDocument(model, tuple(events), tuple(scenarios))
