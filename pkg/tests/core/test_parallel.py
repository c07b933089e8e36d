from topocell.core.parallel import ParallelRunner, ordered_map


def square(value):
    return value * value


def test_ordered_map_in_process():
    assert ordered_map(square, range(5)) == [0, 1, 4, 9, 16]


def test_ordered_map_keeps_submission_order():
    items = list(range(20, 0, -1))

    assert ordered_map(square, items, threads=2) == [square(i) for i in items]


def test_single_item_runs_inline():
    assert ordered_map(square, [7], threads=4) == [49]


def test_runner_collects_once():
    with ParallelRunner(1) as runner:
        runner.submit(square, 3)
        runner.submit(square, 4)

        assert runner.collect() == [9, 16]
        assert runner.collect() == []


def test_runner_clamps_threads():
    with ParallelRunner(0) as runner:
        assert runner.threads == 1
