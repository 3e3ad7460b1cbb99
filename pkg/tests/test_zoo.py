import numpy as np
import pytest

from contactsolitons import zoo
from contactsolitons.zoo import ZooError


class TestRegistry:
    def test_names(self):
        assert set(zoo.names()) == {
            "paper-kenmotsu",
            "flat-cosymplectic-3",
            "flat-cosymplectic-5",
            "alpha-kenmotsu-2",
            "sasakian-r3",
        }

    def test_unknown_name(self):
        with pytest.raises(ZooError):
            zoo.load("nope")

    def test_load_is_cached(self):
        assert zoo.load("paper-kenmotsu") is zoo.load("paper-kenmotsu")


class TestEntries:
    @pytest.mark.parametrize("name", zoo.names())
    def test_self_validate(self, name):
        # raises ZooError when an entry fails its own structural conditions
        zoo.load(name).self_validate()

    @pytest.mark.parametrize("name", zoo.names())
    def test_plans_respect_domain(self, name):
        entry = zoo.load(name)
        for p in entry.plan.points(entry.chart):
            assert entry.chart.contains(p)

    def test_paper_entry_shape(self, paper):
        assert paper.chart.dim == 3
        assert {c.name for c in paper.candidates} == {
            "v-riemann", "v-ricci", "xi-riemann", "xi-ricci", "xi-yamabe",
        }
        assert paper.frame is not None and len(paper.frame) == 3
        assert len(paper.plan.points(paper.chart)) >= 100

    def test_paper_expected_values_recorded(self, paper):
        claims = {e.claim for e in paper.expected}
        assert any("Ric" in c or "ricci" in c for c in claims)
        assert len(paper.expected) >= 10

    def test_paper_frame_is_orthonormal(self, paper):
        p = [0.3, -0.3, 1.5]
        gm = paper.metric.matrix_at(p)
        frame = np.stack([e.evaluate(p) for e in paper.frame], axis=1)
        assert np.abs(frame.T @ gm @ frame - np.eye(3)).max() <= 1e-12

    def test_flat5_dimension(self):
        entry = zoo.load("flat-cosymplectic-5")
        assert entry.chart.dim == 5
        assert entry.structure.n == 2

    def test_candidate_lookup(self, paper):
        c = paper.candidate("v-riemann")
        assert c.kind == "riemann"
        with pytest.raises(ZooError):
            paper.candidate("missing")

    def test_classifications(self):
        expect = {
            "paper-kenmotsu": "Kenmotsu",
            "flat-cosymplectic-3": "cosymplectic",
            "flat-cosymplectic-5": "cosymplectic",
            "alpha-kenmotsu-2": "alpha-Kenmotsu",
            "sasakian-r3": "Sasakian",
        }
        for name, tag in expect.items():
            assert zoo.load(name).profile().class_tag == tag, name
