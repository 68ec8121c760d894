"""Witness trees on a tiny instance: how often does each small tree show up?"""

from permlll.engine import EngineConfig, Instance, run
from permlll.events import ExplicitList
from permlll.verify import tiny_instance, witness_tree_experiment
from permlll.witness import build_witness_tree, project_witness_subdag

sizes, events = tiny_instance()
for e in events:
    print("event", e.id, [tuple(t) for t in e.triples])

# one run, its log and the witness tree of its last resampling
instance = Instance(sizes, ExplicitList(events, sizes))
for seed in range(100):
    out = run(instance, EngineConfig(seed=seed))
    if len(out.log) >= 3:
        break
print("seed", seed, "resampled", [entry.event.id for entry in out.log])
tree = build_witness_tree(out.log, len(out.log))
print("witness tree (event, children):", tree.key())
dag = project_witness_subdag(tree, 0)
print("projection labels", dag.labels(), "edges", sorted(dag.edges))

# frequencies against the product of event probabilities
for key, r in witness_tree_experiment(20_000).items():
    print("%-28s observed %.4f  bound %.4f" % (key, r.estimate, r.bound))
