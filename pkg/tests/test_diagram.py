import pytest

from linkvol import diagram

TREFOIL = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"
FIG8 = "X[4,8,5,7] X[8,4,1,3] X[2,5,3,6] X[6,1,7,2]"
WHITEHEAD = "X[1,6,2,5] X[3,7,4,8] X[8,4,9,1] X[10,3,5,2] X[6,9,7,10]"
# two-component diagram with curls: both an over-arc and an under-arc pass
# three crossings in a row, which exercises the multi-passage bookkeeping
KINKED = "X[5,1,6,2] X[6,3,7,2] X[3,4,4,1] X[7,5,8,8]"

ALL = [TREFOIL, FIG8, WHITEHEAD, KINKED]


def test_parse_pd_compact():
    pd = diagram.parse_pd(FIG8)
    assert len(pd.crossings) == 4
    assert pd.crossings[0] == (4, 8, 5, 7)


def test_parse_pd_json_form():
    pd = diagram.parse_pd(
        '{"pd": [[4,8,5,7],[8,4,1,3],[2,5,3,6],[6,1,7,2]]}')
    assert pd.crossings == diagram.parse_pd(FIG8).crossings


def test_parse_pd_accepts_comments_and_multiline():
    text = "X[1,4,2,5]  # first\nX[3,6,4,1],X[5,2,6,3]\n"
    assert diagram.parse_pd(text).crossings == \
        diagram.parse_pd(TREFOIL).crossings


def test_parse_pd_rejects_bad_input():
    with pytest.raises(diagram.DiagramError, match="empty"):
        diagram.parse_pd("   ")
    with pytest.raises(diagram.DiagramError, match="syntax error"):
        diagram.parse_pd("X[1,2,3] X[4,5,6,7]")
    with pytest.raises(diagram.DiagramError, match="appears"):
        diagram.parse_pd("X[1,1,1,2] X[2,3,3,4]")
    with pytest.raises(diagram.DiagramError, match="positive"):
        diagram.parse_pd("X[0,1,0,1]")


def test_figure_eight_combinatorics():
    d = diagram.load_diagram(FIG8)
    assert d.summary() == "n=6 regions, 4 crossings, 1 component"
    assert d.n_regions == 6
    assert d.n_components == 1
    assert [c.sign for c in d.crossings] == [1, 1, -1, -1]
    assert d.writhes == [0]


def test_trefoil_combinatorics():
    d = diagram.load_diagram(TREFOIL)
    assert d.n_regions == 5
    assert d.n_components == 1
    assert [c.sign for c in d.crossings] == [-1, -1, -1]
    assert d.writhes == [-3]


def test_whitehead_combinatorics():
    d = diagram.load_diagram(WHITEHEAD)
    assert d.summary() == "n=7 regions, 5 crossings, 2 components"
    assert sorted(d.writhes) == [-1, 0]
    assert sum(c.sign for c in d.crossings) == -1


def test_region_count_is_euler():
    for pd in ALL:
        d = diagram.load_diagram(pd)
        assert d.n_regions == d.n_crossings + 2


def test_edges_traverse_components():
    for pd in ALL:
        d = diagram.load_diagram(pd)
        seen = set()
        for comp in d.components:
            e = comp[0]
            cycle = []
            while e not in seen:
                seen.add(e)
                cycle.append(e)
                e = d.succ[e]
            assert sorted(cycle) == sorted(comp)
        assert len(seen) == 2 * d.n_crossings


def test_left_and_right_regions_differ():
    # a diagram edge always separates two distinct regions
    for pd in ALL:
        d = diagram.load_diagram(pd)
        for e in d.succ:
            assert d.left_region[e] != d.right_region[e]


def test_arcs_partition_edges():
    for pd in ALL:
        d = diagram.load_diagram(pd)
        for arcs in (d.over_arcs, d.under_arcs):
            flattened = [e for arc in arcs for e in arc]
            assert sorted(flattened) == sorted(d.succ)


def test_kinked_has_multi_passage_arcs():
    d = diagram.load_diagram(KINKED)
    assert d.n_components == 2
    assert max(len(a) for a in d.over_arcs) >= 3
    assert max(len(a) for a in d.under_arcs) >= 3


def test_wirtinger_presentation_shape():
    for pd in ALL:
        d = diagram.load_diagram(pd)
        pres = diagram.wirtinger(d)
        assert len(pres.relations) == d.n_crossings
        assert pres.n_generators == len(d.over_arcs)
        for out, over, inn, eps in pres.relations:
            assert eps in (-1, 1)
            for g in (out, over, inn):
                assert 0 <= g < pres.n_generators


def test_longitude_words_abelianize_to_zero():
    # the canonical longitude is null-homologous in the knot complement:
    # its total signed generator count, meridian correction included, is 0
    for pd in (TREFOIL, FIG8):
        d = diagram.load_diagram(pd)
        word = diagram.longitude_word(d, 0)
        assert sum(e for _, e in word.letters) == 0


def test_figure_eight_longitude_word():
    d = diagram.load_diagram(FIG8)
    assert str(diagram.longitude_word(d, 0)) == "g3^-1 g4 g1^-1 g2"


def test_writhe_helper_matches_table():
    d = diagram.load_diagram(WHITEHEAD)
    for i in range(d.n_components):
        assert diagram.writhe(d, i) == d.writhes[i]


def test_longitude_word_bad_component():
    d = diagram.load_diagram(FIG8)
    with pytest.raises(diagram.DiagramError):
        diagram.longitude_word(d, 1)


def test_meridian_override():
    pd = diagram.parse_pd(
        '{"pd": [[4,8,5,7],[8,4,1,3],[2,5,3,6],[6,1,7,2]],'
        ' "meridians": ["g3"]}')
    d = diagram.build_diagram(pd)
    assert d.meridian_gen == [2]
    with pytest.raises(diagram.DiagramError, match="bad generator name"):
        diagram.build_diagram(diagram.parse_pd(
            '{"pd": [[4,8,5,7],[8,4,1,3],[2,5,3,6],[6,1,7,2]],'
            ' "meridians": [3]}'))
