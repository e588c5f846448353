"""Endpoint behavior through the in-process ASGI transport.

The client used here is the same one the CLI runs on, so these tests
cover the full request/response path short of an actual socket.
"""

import pytest

import parknav
from parknav.client import ServiceClient, ServiceError
from parknav.scenario import scenario_to_doc


@pytest.fixture(scope="module")
def client():
    return ServiceClient()


@pytest.fixture(scope="module")
def tiny_doc(tiny):
    return scenario_to_doc(tiny).model_dump()


class TestHealth:
    def test_reports_version(self, client):
        body = client.health()
        assert body["status"] == "ok"
        assert body["version"] == parknav.__version__


class TestSynth:
    def test_shapes(self, client):
        doc = client.synth(seed=3, n_lots=5, total_capacity=60, n_entries=4)["scenario"]
        assert len(doc["lots"]) == 5
        assert sum(lot["capacity"] for lot in doc["lots"]) == 60
        assert len(doc["entries"]) == 4
        assert doc["demand_K"] == 60  # defaults to total capacity

    def test_deterministic(self, client):
        a = client.synth(seed=9, n_lots=4, total_capacity=30, n_entries=2)
        b = client.synth(seed=9, n_lots=4, total_capacity=30, n_entries=2)
        assert a == b

    def test_impossible_split_is_400(self, client):
        with pytest.raises(ServiceError) as err:
            client.synth(seed=0, n_lots=10, total_capacity=5, n_entries=2)
        assert err.value.status_code == 400


class TestValidate:
    def test_valid(self, client, tiny_doc):
        assert client.validate(tiny_doc) == {"valid": True, "violations": []}

    def test_demand_violation_listed(self, client, tiny_doc):
        doc = {**tiny_doc, "demand_K": 10_000}
        body = client.validate(doc)
        assert body["valid"] is False
        assert any("demand" in v for v in body["violations"])

    def test_malformed_document_is_422(self, client, tiny_doc):
        doc = {k: v for k, v in tiny_doc.items() if k != "lots"}
        with pytest.raises(ServiceError) as err:
            client.validate(doc)
        assert err.value.status_code == 422


class TestOptimize:
    def test_auto_resolves_exact_fill_when_demand_equals_supply(self, client, tiny_doc):
        body = client.optimize(tiny_doc, seed=4, mode="auto")
        assert body["mode"] == "exact_fill"

    def test_rows_cover_fleet_once(self, client, tiny, tiny_doc):
        body = client.optimize(tiny_doc, seed=4)
        ids = [r["vehicle_id"] for r in body["rows"]]
        assert len(ids) == tiny.demand
        assert len(set(ids)) == tiny.demand

    def test_capacities_respected(self, client, tiny, tiny_doc):
        body = client.optimize(tiny_doc, seed=4)
        counts: dict[str, int] = {}
        for r in body["rows"]:
            counts[r["lot_id"]] = counts.get(r["lot_id"], 0) + 1
        caps = {lot.id: lot.capacity for lot in tiny.lots}
        assert all(counts[lot] <= caps[lot] for lot in counts)

    def test_total_is_sum_of_rows(self, client, tiny_doc):
        body = client.optimize(tiny_doc, seed=4)
        assert body["total_cost_s"] == pytest.approx(
            sum(r["total_s"] for r in body["rows"]), rel=1e-9
        )
        assert body["mean_cost_s"] == pytest.approx(
            body["total_cost_s"] / len(body["rows"])
        )

    def test_infeasible_demand_is_409(self, client, tiny_doc):
        doc = {**tiny_doc, "demand_K": tiny_doc["demand_K"] + 5, "allow_overflow": True}
        with pytest.raises(ServiceError) as err:
            client.optimize(doc)
        assert err.value.status_code == 409

    def test_invalid_scenario_is_400_with_violations(self, client, tiny_doc):
        doc = {**tiny_doc, "demand_K": 10_000}
        with pytest.raises(ServiceError) as err:
            client.optimize(doc)
        assert err.value.status_code == 400
        assert any("demand" in line for line in err.value.detail_lines())


class TestSimulate:
    def test_default_runs_equal_group_mix(self, client, tiny, tiny_doc):
        body = client.simulate(tiny_doc, runs=2, seed=8)
        assert body["summary"]["n_runs"] == 2
        assert body["summary"]["fleet_size"] == tiny.demand
        assert len(body["runs"]) == 2
        strategies = {v["strategy"] for v in body["vehicles"]}
        assert len(strategies) > 1  # a mix, not a single strategy

    def test_convergence_first_row_undefined(self, client, tiny_doc):
        body = client.simulate(tiny_doc, runs=3, seed=8)
        conv = body["convergence"]
        assert [c["n"] for c in conv] == [1, 2, 3]
        assert conv[0]["rerouting_rel_change"] is None
        assert conv[0]["failed_profile_drift"] is None

    def test_method_label(self, client, tiny_doc):
        body = client.simulate(tiny_doc, method="opt", runs=1, seed=8)
        assert body["summary"]["mean_rerouting_s"] == 0.0
        assert body["summary"]["mean_failed_total"] == 0.0

    def test_single_strategy_mix(self, client, tiny_doc):
        body = client.simulate(tiny_doc, mix={"min_walk": 1.0}, runs=1, seed=8)
        assert {v["strategy"] for v in body["vehicles"]} == {"min_walk"}

    def test_mix_weights_normalized(self, client, tiny_doc):
        a = client.simulate(tiny_doc, mix={"min_walk": 2.0, "min_total": 2.0}, seed=8)
        b = client.simulate(tiny_doc, mix={"min_walk": 0.5, "min_total": 0.5}, seed=8)
        assert a == b

    def test_assignment_replay(self, client, tiny, tiny_doc):
        plan = {
            r["vehicle_id"]: r["lot_id"]
            for r in client.optimize(tiny_doc, seed=8)["rows"]
        }
        body = client.simulate(tiny_doc, assignment=plan, runs=1, seed=8)
        assert body["summary"]["mean_parked"] == tiny.demand
        assert body["summary"]["mean_failed_total"] == 0.0
        parked = {v["vehicle_id"]: v["parked_lot"] for v in body["vehicles"]}
        assert parked == plan

    def test_events_opt_in(self, client, tiny_doc):
        off = client.simulate(tiny_doc, runs=1, seed=8)
        assert off["events"] is None
        on = client.simulate(tiny_doc, runs=1, seed=8, include_events=True)
        assert on["events"]
        assert {e["event"] for e in on["events"]} >= {"enter", "arrive_lot", "park"}

    def test_vehicles_opt_out(self, client, tiny_doc):
        body = client.simulate(tiny_doc, runs=1, seed=8, include_vehicles=False)
        assert body["vehicles"] is None

    def test_method_and_mix_together_is_400(self, client, tiny_doc):
        with pytest.raises(ServiceError) as err:
            client.simulate(tiny_doc, method="opt", mix={"min_walk": 1.0})
        assert err.value.status_code == 400

    def test_unknown_method_is_400(self, client, tiny_doc):
        with pytest.raises(ServiceError) as err:
            client.simulate(tiny_doc, method="teleport")
        assert err.value.status_code == 400

    def test_unknown_mix_kind_is_400(self, client, tiny_doc):
        with pytest.raises(ServiceError) as err:
            client.simulate(tiny_doc, mix={"valet": 1.0})
        assert err.value.status_code == 400

    def test_negative_mix_weight_is_400(self, client, tiny_doc):
        with pytest.raises(ServiceError) as err:
            client.simulate(tiny_doc, mix={"min_walk": -1.0})
        assert err.value.status_code == 400

    def test_incomplete_assignment_is_409(self, client, tiny_doc):
        with pytest.raises(ServiceError) as err:
            client.simulate(tiny_doc, assignment={"v00001": tiny_doc["lots"][0]["id"]})
        assert err.value.status_code == 409

    def test_invalid_scenario_is_400(self, client, tiny_doc):
        doc = {**tiny_doc, "demand_K": 10_000}
        with pytest.raises(ServiceError) as err:
            client.simulate(doc)
        assert err.value.status_code == 400
        assert err.value.detail_lines()


class TestCompare:
    def test_rows_in_request_order(self, client, tiny_doc):
        body = client.compare(tiny_doc, methods=["opt", "nearest"], runs=2, seed=8)
        assert [r["method"] for r in body["rows"]] == ["opt", "nearest"]
        for row in body["rows"]:
            assert row["runs"] == 2
            assert 0.0 <= row["parked_fraction"] <= 1.0

    def test_opt_never_fails_searches(self, client, tiny_doc):
        body = client.compare(tiny_doc, methods=["opt", "g-mix"], runs=2, seed=8)
        opt = next(r for r in body["rows"] if r["method"] == "opt")
        assert opt["failed_search_total"] == 0
        assert opt["mean_rerouting_min"] == 0.0

    def test_unknown_label_is_400(self, client, tiny_doc):
        with pytest.raises(ServiceError) as err:
            client.compare(tiny_doc, methods=["opt", "teleport"])
        assert err.value.status_code == 400

    def test_single_method_is_422(self, client, tiny_doc):
        with pytest.raises(ServiceError) as err:
            client.compare(tiny_doc, methods=["opt"])
        assert err.value.status_code == 422
