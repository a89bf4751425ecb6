import yaml
from jobflow import run_locally

from PEVSiter.maker import StationSitingMaker
from PEVSiter.network import load_network

# The six-node city: residential {1, 2}, commercial {4, 5}, other {3, 6}.
network = load_network("six_node.json")

with open("siting.yaml") as fin:
    options = yaml.safe_load(fin)

flow = StationSitingMaker(
    name="six-node", options=options, validate_with_oracle=True
).make(network)

# Run with the in-memory job store. Use flow_to_workflow from
# jobflow.managers.fireworks to submit the same flow to Fireworks instead.
responses = run_locally(flow, ensure_success=True)

ga_document = responses[flow.jobs[1].uuid][1].output
oracle_document = responses[flow.jobs[2].uuid][1].output
print("GA stations:", ga_document.best_stations, ga_document.best_unsatisfied_soc)
print("Optimal stations:", oracle_document.stations, oracle_document.unsatisfied_soc)
