"""Drive the planning service end to end, in process.

Creates a session from a generated instance, solves it, asks what a
capacity cut would do to the worst request, and commits a fix. The same
calls work against a real deployment (run `havnfp serve`); the test
client here just saves starting a server for a demo.
"""

from fastapi.testclient import TestClient

from havnfp import GeneratorConfig, generate, instance_to_doc
from havnfp.service import create_app

client = TestClient(create_app())

doc = instance_to_doc(generate(GeneratorConfig(requests=12, multiplier=1.5, seed=4)))
session = client.post("/v1/sessions", json=doc).json()
sid = session["id"]
print("session", sid)

solved = client.post(f"/v1/sessions/{sid}/solve", json={"algorithm": "vns"}).json()
report = solved["report"]
print("solved: A_min", report["objective"], "worst", report["worstRequests"])

# probe: what happens if every server loses a fifth of its capacity?
probe = client.post(
    f"/v1/sessions/{sid}/whatif",
    json={"delta": {"op": "scale_capacity", "server": "*", "factor": 0.8}, "timeLimit": 5.0},
).json()
print(
    "capacity cut probe: A_min",
    f"{probe['old']['objective']:.7f} -> {probe['new']['objective']:.7f}",
    "worst set +", probe["worstDiff"]["entered"], "-", probe["worstDiff"]["left"],
)

# commit: upgrade every software type instead
commit = client.post(
    f"/v1/sessions/{sid}/whatif",
    json={
        "delta": {"op": "set_availability", "kind": "vnf", "name": "*", "value": 0.99999},
        "commit": True,
        "timeLimit": 5.0,
    },
).json()
print(
    "committed vnf upgrade: A_min",
    f"{commit['old']['objective']:.7f} -> {commit['new']['objective']:.7f}",
)

history = client.get(f"/v1/sessions/{sid}").json()["history"]
print("history now holds", len(history), "committed change(s)")
