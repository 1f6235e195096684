import pytest

import ntriples
import schemagen

EX = 'http://ex.org/'


@pytest.fixture
def st(nt_bytes):
    return schemagen.gen_st(ntriples.parse_ntriples(nt_bytes))


def test_st_keeps_order(st):
    assert len(st) == 6
    assert st.columns == ('s', 'p', 'o')
    assert st.rows[0] == (EX + 'alice', EX + 'knows', EX + 'bob')
    assert st.rows[4] == (EX + 'carol', EX + 'age', '27')

def test_vp(st):
    vp = schemagen.gen_vp(st)
    assert list(vp.tables) == ['age', 'knows', 'name']
    assert [len(t) for t in vp] == [1, 3, 2]
    assert vp.total_rows() == len(st)
    assert vp.name_manifest[EX + 'knows'] == 'knows'
    assert vp['name'].rows == [(EX + 'alice', 'Alice'), (EX + 'bob', 'Bob')]

def test_name_collisions():
    rows = [('s', 'http://y.org/a', '1'), ('s', 'http://x.org/a', '2'),
            ('s', 'http://x.org/has-name', '3'), ('s', 'http://x.org/9lives', '4')]
    vp = schemagen.gen_vp(schemagen.RelTable('st', ('s', 'p', 'o'), rows))
    assert vp.name_manifest == {'http://x.org/9lives': '_9lives',
                                'http://x.org/a': 'a',
                                'http://x.org/has-name': 'has_name',
                                'http://y.org/a': 'a_1'}

def test_sanitize_name():
    assert schemagen.sanitize_name('http://x.org/ns#label') == 'label'
    assert schemagen.sanitize_name('<http://x.org/a.b>') == 'a_b'

def test_wpt(st):
    wpt = schemagen.gen_wpt(st)
    assert wpt.columns == ('s', 'age', 'knows', 'name')
    assert wpt.rows == [
        (EX + 'alice', None, EX + 'bob', 'Alice'),
        (EX + 'alice', None, EX + 'carol', None),
        (EX + 'bob', None, EX + 'carol', 'Bob'),
        (EX + 'carol', '27', None, None),
    ]

def test_wpt_unnests_multi_values():
    rows = [('s1', 'p', 'v1'), ('s1', 'p', 'v2'), ('s1', 'q', 'w')]
    wpt = schemagen.gen_wpt(schemagen.RelTable('st', ('s', 'p', 'o'), rows))
    assert wpt.rows == [('s1', 'v1', 'w'), ('s1', 'v2', None)]

def test_wpt_predicate_named_s():
    rows = [('x', 'http://ex.org/s', '1')]
    wpt = schemagen.gen_wpt(schemagen.RelTable('st', ('s', 'p', 'o'), rows))
    assert wpt.columns == ('s', 's_1')

def test_extvp_reductions(st):
    vp = schemagen.gen_vp(st)
    ext = schemagen.gen_extvp(vp, schemagen.ExtVpParams(('SS', 'OS', 'SO')))
    ss = ext[schemagen.extvp_name('name', 'knows', 'SS')]
    assert ss.rows == [(EX + 'alice', 'Alice'), (EX + 'bob', 'Bob')]
    os_ = ext['extvp_os__knows__knows']
    assert os_.rows == [(EX + 'alice', EX + 'bob')]
    so = ext['extvp_so__age__knows']
    assert so.rows == [(EX + 'carol', '27')]
    assert 'extvp_ss__knows__age' not in ext.tables
    assert ext.reductions['extvp_so__age__knows'] == ('age', 'knows', 'SO')

def test_extvp_rows_are_subsets(st):
    vp = schemagen.gen_vp(st)
    ext = schemagen.gen_extvp(vp, schemagen.ExtVpParams(schemagen.JOIN_KINDS))
    assert len(ext) > 0
    for name, table in ext.tables.items():
        source = vp[ext.reductions[name][0]]
        assert table.rows
        assert set(table.rows) <= set(source.rows)

def test_extvp_threshold(st):
    vp = schemagen.gen_vp(st)
    ext = schemagen.gen_extvp(vp, schemagen.ExtVpParams(('SS', 'OS'), 0.5))
    assert list(ext.tables) == ['extvp_os__knows__knows', 'extvp_os__knows__name']

def test_extvp_params_validated():
    with pytest.raises(schemagen.SchemaError):
        schemagen.ExtVpParams(('XY',))
    with pytest.raises(schemagen.SchemaError):
        schemagen.ExtVpParams(('SS',), 0)

def test_build_schema(st):
    assert list(schemagen.build_schema('ST', st).tables) == ['st']
    ext = schemagen.build_schema('ExtVP', st)
    assert {'age', 'knows', 'name'} <= set(ext.tables)
    assert len(schemagen.build_schema('WPT', st)) == 1

def test_predicate_named_like_extvp_table():
    rows = [('s1', 'http://x.org/a', 'o1'), ('s1', 'http://x.org/b', 'o2'),
            ('z', 'http://x.org/extvp_ss__a__b', 'q')]
    ext = schemagen.build_schema('ExtVP', schemagen.RelTable('st', ('s', 'p', 'o'), rows))
    assert ext.name_manifest['http://x.org/extvp_ss__a__b'] == '_extvp_ss__a__b'
    assert ext['_extvp_ss__a__b'].rows == [('z', 'q')]
    assert ext['extvp_ss__a__b'].rows == [('s1', 'o1')]
    assert ext.reductions['extvp_ss__a__b'] == ('a', 'b', 'SS')

def test_pt_unsupported(st):
    with pytest.raises(schemagen.SchemaError):
        schemagen.build_schema('PT', st)

def test_empty_graph():
    st = schemagen.gen_st([])
    assert len(schemagen.gen_vp(st)) == 0
    assert schemagen.gen_wpt(st).rows == []

def test_manifest_file(tmp_path, st):
    vp = schemagen.gen_vp(st)
    path = str(tmp_path / 'names.csv')
    schemagen.write_manifest(path, vp.name_manifest)
    assert schemagen.read_manifest(path) == vp.name_manifest
