import math
from collections import Counter

import numpy as np
import pytest

from measures.magic import linear_entropy, m_lin, pauli_spectrum
from qlin.ops import partial_trace_B
from stabilizers.atlas import (
    N_STATES,
    UNASSIGNED,
    IndexOutOfRange,
    atlas,
    entangled_indices,
    group_of,
    representatives,
    stabilizer,
    state_matrix,
    taxonomy,
    tensor_indices,
)


class TestAtlas:
    def test_size_and_split(self):
        states = atlas()
        assert len(states) == N_STATES == 60
        assert [s.index for s in states if not s.entangled] == list(tensor_indices())
        assert len(tensor_indices()) == 36
        assert len(entangled_indices()) == 24

    def test_all_states_are_magic_free(self):
        for st in atlas():
            assert m_lin(pauli_spectrum(st.state)) <= 1e-12

    def test_entanglement_flag(self):
        for st in atlas():
            e = linear_entropy(partial_trace_B(st.state))
            if st.entangled:
                assert e == pytest.approx(0.5, abs=1e-12)
            else:
                assert e == pytest.approx(0.0, abs=1e-12)

    def test_states_are_distinct(self):
        m = state_matrix(tuple(range(1, N_STATES + 1)))
        overlaps = np.abs(m.conj() @ m.T) ** 2
        np.fill_diagonal(overlaps, 0.0)
        assert overlaps.max() < 1 - 1e-9

    @pytest.mark.parametrize(
        "index, amps",
        [
            (33, [1, 0, 0, 0]),
            (1, [0.5, 0.5, 0.5, 0.5]),
            (39, [1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)]),
        ],
    )
    def test_rows(self, index, amps):
        np.testing.assert_allclose(stabilizer(index).state.amps, amps, atol=1e-15)

    @pytest.mark.parametrize("index", [0, 61, -1, 2.5])
    def test_out_of_range(self, index):
        with pytest.raises(IndexOutOfRange):
            stabilizer(index)


class TestTaxonomy:
    def test_examples(self):
        assert group_of("nn", 33) == "G1"
        assert group_of("moller", 34) == "G4"
        assert group_of("moller", 9) == "G5b"
        assert group_of("moller", 43) == UNASSIGNED

    def test_nn_cardinalities(self):
        tax = taxonomy("nn")
        tensor = Counter(tax.assignment[i] for i in tensor_indices())
        entangled = Counter(tax.assignment[i] for i in entangled_indices())
        assert tensor == {"G1": 6, "G2": 6, "G3": 24}
        assert entangled == {"G1": 10, "G2": 6, "G3": 8}
        assert tax.unassigned() == ()

    def test_moller_cardinalities(self):
        tax = taxonomy("moller")
        tensor = Counter(tax.assignment[i] for i in tensor_indices())
        entangled = Counter(tax.assignment[i] for i in entangled_indices())
        assert tensor == {"G1": 2, "G2": 4, "G3": 4, "G4": 2, "G5a": 8, "G5b": 16}
        assert entangled == {"G1": 6, "G2": 4, "G3": 4, "G4": 1, "G5ent": 8, UNASSIGNED: 1}
        assert tax.unassigned() == (43,)

    def test_label_order(self):
        assert taxonomy("nn").labels == ("G1", "G2", "G3")
        assert taxonomy("moller").labels[-1] == UNASSIGNED

    def test_unknown_process(self):
        with pytest.raises(ValueError):
            taxonomy("bhabha")


class TestRepresentatives:
    def test_nn(self):
        reps = dict(representatives("nn"))
        assert list(reps) == ["G1", "G2", "G3"]
        np.testing.assert_allclose(reps["G2"].amps, [0, 1, 0, 0])
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(reps["G3"].amps, [s, 0, s, 0], atol=1e-15)

    def test_moller(self):
        reps = dict(representatives("moller"))
        assert list(reps) == ["G1", "G2", "G3", "G4", "G5a", "G5b"]
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(reps["G5b"].amps, [s, s, 0, 0], atol=1e-15)
        np.testing.assert_allclose(reps["G1"].amps, [1, 0, 0, 0])

    def test_representatives_belong_to_their_group(self):
        for process in ("nn", "moller"):
            tax = taxonomy(process)
            for label, psi in representatives(process):
                members = state_matrix(tax.members(label))
                assert np.max(np.abs(members.conj() @ psi.amps)) == pytest.approx(1.0, abs=1e-12)
