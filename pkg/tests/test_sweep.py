"""
Tests for the seeded sweep.
"""

from twapprox.graph import ProblemKind
from twapprox.reports import render
from twapprox.sweep import SweepConfig, build_corpus, materialize, run_item, run_sweep


def small_config(**overrides):
    params = dict(seed=3, count=6, n_max=8, ks=(1, 2), budgets=(1, 2))
    params.update(overrides)
    return SweepConfig(**params)


class TestBuildCorpus:
    """Tests for build_corpus and materialize."""

    def test_deterministic(self):
        """Test equal seeds give equal corpora."""
        assert build_corpus(small_config()) == build_corpus(small_config())

    def test_kinds_round_robin(self):
        """Test kinds cycle through the configured list."""
        kinds = [item.kind for item in build_corpus(small_config())]
        assert kinds == [ProblemKind.CVC, ProblemKind.TSS, ProblemKind.VDS] * 2

    def test_sizes_in_range(self):
        """Test n lies in [k + 2, n_max]."""
        for item in build_corpus(small_config(count=30)):
            assert item.k + 2 <= item.n <= 8

    def test_materialize(self):
        """Test the generated instance matches the item."""
        item = build_corpus(small_config())[0]
        instance, td = materialize(item)
        assert instance.kind is item.kind
        assert instance.graph.n == item.n
        assert td.width <= item.k


class TestRunSweep:
    """Tests for run_item and run_sweep."""

    def test_entries_agree_with_oracles(self):
        """Test every solver agrees with its oracle on a small corpus."""
        report = run_sweep(small_config())
        assert report.count == 6
        assert [e.index for e in report.entries] == list(range(6))
        assert report.agreements["entries_with_errors"] == 0
        assert report.agreements["exact_matches_oracle"] == 2
        for entry in report.entries:
            if entry.kind == "cvc":
                assert entry.approx_within_bound
            else:
                assert entry.framework_within_bound
                assert set(entry.framework) == {1, 2}

    def test_render_reproducible(self):
        """Test two runs with the same seed render identically."""
        assert render(run_sweep(small_config())) == render(run_sweep(small_config()))

    def test_workers_keep_corpus_order(self):
        """Test a thread pool gives the same report as a serial run."""
        serial = run_sweep(small_config())
        threaded = run_sweep(small_config(workers=3))
        assert [e.instance_hash for e in threaded.entries] == [e.instance_hash for e in serial.entries]
        assert threaded.agreements == serial.agreements

    def test_guard_recorded_not_raised(self, settings):
        """Test a resource guard becomes an entry error."""
        config = small_config(settings=settings.model_copy(update={"guard_max": 1}))
        entry = run_item(build_corpus(config)[0], config)
        assert entry.errors
        assert entry.errors[0].startswith("ResourceLimitError")

    def test_timings_off_by_default(self):
        """Test wall times are omitted unless requested."""
        report = run_sweep(small_config(count=3))
        assert report.meta.wall_time_s is None
        assert all(e.wall_time_s is None for e in report.entries)
