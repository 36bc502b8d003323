import itertools

import numpy as np
import pytest

from allocation import (Acuity, Assignment, Hospital, InconsistentStateError, Patient, PatientStatus,
                        allocate_batch, assignment_cost, utilization)


def secondary_network(capacity=40, capabilities=None):
    capabilities = capabilities or {}
    return [Hospital(id=hid, capacity=capacity, transfer_cost=cost,
                     acuity_capabilities=capabilities.get(hid, frozenset(Acuity)))
            for hid, cost in (('H2', 10.0), ('H3', 15.0), ('H4', 20.0), ('H5', 25.0))]


def test_low_acuity_goes_to_cheapest():
    assignments, overflow = allocate_batch([Patient(1, Acuity.LOW, 0.0)], secondary_network())
    assert overflow == []
    assert [(a.hospital_id, a.cost) for a in assignments] == [('H2', 10.0)]


def test_high_acuity_skips_incompatible_hospital():
    network = secondary_network(capabilities={'H2': frozenset({Acuity.LOW, Acuity.MEDIUM})})
    assignments, _ = allocate_batch([Patient(1, Acuity.HIGH, 0.0)], network)
    assert [(a.hospital_id, a.cost) for a in assignments] == [('H3', 15.0)]


def test_full_network_overflows():
    network = [Hospital(id=h.id, capacity=5, transfer_cost=h.transfer_cost, occupancy=5)
               for h in secondary_network()]
    patient = Patient(1, Acuity.LOW, 0.0)
    assignments, overflow = allocate_batch([patient], network)
    assert assignments == []
    assert overflow == [1]
    assert patient.status is PatientStatus.OVERFLOW


def test_occupancy_updates_within_batch():
    network = secondary_network(capacity=1)
    patients = [Patient(i, Acuity.LOW, 0.0) for i in range(5)]
    assignments, overflow = allocate_batch(patients, network)
    assert [a.hospital_id for a in assignments] == ['H2', 'H3', 'H4', 'H5']
    assert overflow == [4]
    assert all(h.occupancy == 1 for h in network)


def test_front_line_never_receives():
    network = [Hospital(id='H1', capacity=60, transfer_cost=0.0, front_line=True)] + secondary_network()
    assignments, _ = allocate_batch([Patient(1, Acuity.LOW, 0.0)], network)
    assert assignments[0].hospital_id == 'H2'


def test_cost_tie_broken_by_utilization_then_id():
    network = [Hospital(id='HB', capacity=10, transfer_cost=10.0, occupancy=5),
               Hospital(id='HA', capacity=10, transfer_cost=10.0, occupancy=2),
               Hospital(id='HC', capacity=10, transfer_cost=10.0, occupancy=2)]
    assignments, _ = allocate_batch([Patient(1, Acuity.LOW, 0.0)], network)
    assert assignments[0].hospital_id == 'HA'


def test_duplicate_patient_ids_rejected():
    with pytest.raises(ValueError, match='duplicate'):
        allocate_batch([Patient(1, Acuity.LOW, 0.0), Patient(1, Acuity.HIGH, 0.0)], secondary_network())


def test_inconsistent_occupancy_rejected():
    hospital = Hospital(id='H2', capacity=5, transfer_cost=10.0)
    hospital.occupancy = 6
    with pytest.raises(InconsistentStateError, match='inconsistent state'):
        allocate_batch([Patient(1, Acuity.LOW, 0.0)], [hospital])


def test_status_and_hospital_recorded():
    patient = Patient(1, Acuity.MEDIUM, 2.5)
    allocate_batch([patient], secondary_network(), hour=2.5)
    assert patient.status is PatientStatus.RELOCATED
    assert patient.hospital_id == 'H2'


def test_illegal_transition_rejected():
    patient = Patient(1, Acuity.LOW, 0.0)
    patient.transition(PatientStatus.RELOCATED)
    with pytest.raises(ValueError):
        patient.transition(PatientStatus.IN_SERVICE)


def test_assignment_cost_matches_reported_total():
    counts = {'H2': (188, 10.0), 'H3': (119, 15.0), 'H4': (117, 20.0), 'H5': (108, 25.0)}
    assignments = []
    pid = 0
    for hid, (count, cost) in counts.items():
        for _ in range(count):
            assignments.append(Assignment(patient_id=pid, hospital_id=hid, cost=cost))
            pid += 1
    assert assignment_cost(assignments) == 8705
    assert len(assignments) == 532


def test_assignment_cost_examples():
    assert assignment_cost([]) == 0
    assert assignment_cost([Assignment(patient_id=1, hospital_id='H5', cost=25.0)]) == 25


def test_utilization_examples():
    assert utilization(Hospital(id='H', capacity=100), 50) == 0.5
    assert utilization(Hospital(id='H', capacity=100), 0) == 0.0
    with pytest.raises(ValueError):
        utilization(Hospital(id='H', capacity=0), 1)


def brute_force_min_cost(acuities, hospitals):
    best = None
    for choice in itertools.product(range(len(hospitals)), repeat=len(acuities)):
        load = [0] * len(hospitals)
        feasible = True
        for acuity, idx in zip(acuities, choice):
            hospital = hospitals[idx]
            load[idx] += 1
            if acuity not in hospital['caps'] or hospital['occupancy'] + load[idx] > hospital['capacity']:
                feasible = False
                break
        if feasible:
            cost = sum(hospitals[idx]['cost'] for idx in choice)
            best = cost if best is None else min(best, cost)
    return best


def test_greedy_matches_brute_force_on_small_instances():
    rng = np.random.default_rng(99)
    levels = list(Acuity)
    checked = 0
    while checked < 200:
        n_patients = int(rng.integers(1, 7))
        costs = rng.choice(np.arange(1, 50), size=4, replace=False).astype(float)
        specs = []
        for k in range(4):
            caps = {lvl for lvl in levels if rng.random() < 0.8} or {levels[0]}
            specs.append({'id': f"H{k + 2}", 'cost': float(costs[k]), 'caps': caps,
                          'capacity': n_patients + int(rng.integers(0, 3)), 'occupancy': 0})
        acuities = [levels[int(rng.integers(0, 3))] for _ in range(n_patients)]
        oracle = brute_force_min_cost(acuities, specs)
        if oracle is None:
            continue
        network = [Hospital(id=s['id'], capacity=s['capacity'], transfer_cost=s['cost'],
                            acuity_capabilities=frozenset(s['caps'])) for s in specs]
        patients = [Patient(i, a, 0.0) for i, a in enumerate(acuities)]
        assignments, overflow = allocate_batch(patients, network)
        assert overflow == []
        assert assignment_cost(assignments) == oracle
        checked += 1
