import pytest

import partition
import schemagen


def table(nrows, columns=('s', 'p', 'o'), name='st'):
    rows = [tuple('%s%d' % (c, i % 4) for c in columns) for i in range(nrows)]
    return schemagen.RelTable(name, columns, rows)

def reference_fnv(data):
    h = 14695981039346656037
    for b in data:
        h = ((h ^ b) * 1099511628211) % 2 ** 64
    return h


def test_fnv_vectors():
    assert partition.fnv1a_64(b'') == 0xcbf29ce484222325
    assert partition.fnv1a_64(b'a') == 0xaf63dc4c8601ec8c
    assert partition.fnv1a_64(b'foobar') == 0x85944171f73967e8

def test_horizontal_sizes():
    parts = partition.partition(table(10), partition.PartitionPlan('HP', 3))
    assert parts.sizes() == [4, 3, 3]
    assert parts.partitions[1][0] == table(10).rows[1]

def test_single_partition_keeps_order():
    t = table(7)
    for technique in ('HP', 'SBP', 'PBP'):
        plan = partition.PartitionPlan.for_table(technique, 1, t)
        assert partition.partition(t, plan).partitions == [t.rows]

def test_subject_partitioning_matches_hash():
    t = schemagen.RelTable('st', ('s', 'p', 'o'),
                           [('http://ex.org/s%d' % i, 'p', 'o') for i in range(50)])
    parts = partition.partition(t, partition.PartitionPlan.for_table('SBP', 4, t))
    for k, rows in enumerate(parts.partitions):
        for row in rows:
            assert reference_fnv(row[0].encode('utf-8')) % 4 == k
    assert sorted(parts.rows()) == sorted(t.rows)

def test_same_subject_same_partition():
    t = table(40)
    parts = partition.partition(t, partition.PartitionPlan.for_table('SBP', 3, t))
    home = {}
    for k, rows in enumerate(parts.partitions):
        for row in rows:
            assert home.setdefault(row[0], k) == k

def test_predicate_partitioning_without_p_column():
    vp = table(5, columns=('s', 'o'), name='knows')
    plan = partition.PartitionPlan.for_table('PBP', 4, vp)
    assert plan.key_column is None
    parts = partition.partition(vp, plan)
    assert parts.sizes()[partition.bucket('knows', 4)] == 5
    assert sum(parts.sizes()) == 5

def test_subject_partitioning_needs_column():
    t = table(3, columns=('x', 'y'))
    with pytest.raises(partition.PlanError):
        partition.partition(t, partition.PartitionPlan('SBP', 2, 's'))

def test_bad_plan():
    with pytest.raises(partition.PlanError):
        partition.PartitionPlan('RR', 2)
    with pytest.raises(partition.PlanError):
        partition.PartitionPlan('HP', 0)

def test_none_hashes_as_empty():
    assert partition.bucket(None, 7) == partition.bucket('', 7)
